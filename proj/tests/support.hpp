#pragma once

// Shared fixture builders for the test suites.

#include <map>
#include <string>
#include <vector>

#include "dialaudit/corpus.hpp"

namespace testsupport {

using namespace dialaudit;

inline Event user(std::string intent, SlotTags slots = {}) {
    return Event::make_user(std::move(intent), std::move(slots));
}

inline Event status(std::string domain, std::string value) {
    return Event::make_kb_status(std::move(domain), std::move(value));
}

inline Event action(std::string domain, std::string act, SlotTags slots = {}) {
    CanonicalLabel label;
    label.domain = std::move(domain);
    label.act_type = std::move(act);
    label.slots = std::move(slots);
    return Event::make_action(std::move(label));
}

inline DialogueRecord dialogue(std::string id, std::vector<Event> events,
                               std::string source = "test") {
    DialogueRecord d;
    d.id = std::move(id);
    d.events = std::move(events);
    d.source = std::move(source);
    validate_dialogue(d);
    return d;
}

inline Corpus corpus(std::vector<DialogueRecord> dialogues) {
    Corpus c;
    c.dialogues = std::move(dialogues);
    refresh_vocab(c);
    return c;
}

// ---- independent oracles -------------------------------------------------

// Conflict-freeness of a dialogue subset: no window key maps to two distinct
// next actions. Kept separate from ambiguity::find_conflicts.
inline bool subset_conflict_free(const std::vector<const DialogueRecord*>& dialogues, size_t k) {
    std::map<std::string, std::string> seen;  // window -> label key
    for (const DialogueRecord* d : dialogues) {
        for (size_t p = 0; p < d->events.size(); ++p) {
            if (d->events[p].kind() != Event::Kind::Action) continue;
            std::string key = window(d->events, p, k);
            std::string label = d->events[p].action().key();
            auto [it, inserted] = seen.emplace(key, label);
            if (!inserted && it->second != label) return false;
        }
    }
    return true;
}

// Exhaustive maximum conflict-free subset size; feasible up to ~12 dialogues.
inline size_t exhaustive_max_subset_size(const Corpus& corpus, size_t k) {
    size_t n = corpus.dialogues.size();
    size_t best = 0;
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        size_t size = 0;
        std::vector<const DialogueRecord*> subset;
        for (size_t i = 0; i < n; ++i)
            if (mask & (size_t{1} << i)) {
                subset.push_back(&corpus.dialogues[i]);
                ++size;
            }
        if (size > best && subset_conflict_free(subset, k)) best = size;
    }
    return best;
}

// The two-turn hotel dialogue shaped like the canonical example, pre-status.
inline DialogueRecord hotel_example() {
    return dialogue("HOTEL1",
                    {user("inform", {{"hotel_area", "specific"}}),
                     action("hotel", "Select"),
                     user("inform", {{"hotel_name", "specific"}}),
                     action("hotel", "Booking-Book", {{"hotel_reference", "specific"}}),
                     action("hotel", "Inform"),
                     user("bye"),
                     action("general", "Goodbye")});
}

}  // namespace testsupport
