#pragma once

// Event algebra shared by every other module: canonical action labels, user
// and knowledge-base events, dialogue records, and their canonical text form.
//
// Everything here is immutable after construction by convention: loaders and
// stages build new values instead of mutating shared ones, so records and
// corpora can be read from any number of threads.

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dialaudit {

// Bad user input: unreadable files, malformed data, invalid arguments.
// The CLI maps this to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken internal invariant. The CLI maps this to exit code 2.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

inline constexpr const char* kTagSpecific = "specific";
inline constexpr const char* kTagDoNotCare = "do-not-care";

// Status values a knowledge-base lookup can produce.
inline constexpr const char* kStatusUnique = "unique";
inline constexpr const char* kStatusNA = "NA";
inline constexpr const char* kStatusAvailable = "available";
inline constexpr const char* kStatusBooked = "booked";

// Sentinel domain for Booking-Book actions whose venue domain could not be
// inferred from the history.
inline constexpr const char* kUnknownDomain = "unknown";

// Slot annotations: (name, tag) sorted by name, no duplicate names.
using SlotTags = std::vector<std::pair<std::string, std::string>>;

// Raw per-domain belief state, kept as provenance on MultiWOZ records:
// domain -> slot -> raw value string.
using BeliefState = std::map<std::string, std::map<std::string, std::string>>;

// A system action: the unit of prediction. Equality over all three fields is
// prediction-target identity; ordering is lexicographic on key().
struct CanonicalLabel {
    std::string domain;    // lowercase token: hotel, restaurant, general, ...
    std::string act_type;  // Inform, Recommend, Booking-Book, ...
    SlotTags slots;        // sorted, unique names; tags or status values

    // Canonical serialization, e.g. Hotel-Inform{"hotel_area": "specific"}
    std::string key() const;

    bool operator==(const CanonicalLabel&) const = default;
    bool operator<(const CanonicalLabel& other) const { return key() < other.key(); }
};

struct UserEvent {
    std::string intent;  // inform or bye
    SlotTags slots;
    bool operator==(const UserEvent&) const = default;
};

struct KbStatusEvent {
    std::string domain;  // venue domain
    std::string status;  // unique | NA | available | booked
    bool operator==(const KbStatusEvent&) const = default;
};

// One element of a dialogue sequence. The variant index is the kind.
struct Event {
    enum class Kind { User = 0, KbStatus = 1, Action = 2 };

    std::variant<UserEvent, KbStatusEvent, CanonicalLabel> payload;

    Kind kind() const { return static_cast<Kind>(payload.index()); }
    const UserEvent& user() const { return std::get<UserEvent>(payload); }
    const KbStatusEvent& kb_status() const { return std::get<KbStatusEvent>(payload); }
    const CanonicalLabel& action() const { return std::get<CanonicalLabel>(payload); }

    static Event make_user(std::string intent, SlotTags slots);
    static Event make_kb_status(std::string domain, std::string status);
    static Event make_action(CanonicalLabel label);

    bool operator==(const Event&) const = default;
};

// An identified, ordered event sequence plus provenance.
struct DialogueRecord {
    std::string id;
    std::vector<Event> events;
    std::set<std::string> domains;  // domain tokens touched
    std::string source;             // dataset identifier: multiwoz, taskmaster, synth
    bool annotation_complete = true;

    // Provenance: belief state after each user turn, aligned with the user
    // events in order. Empty for sources without belief annotations.
    std::vector<BeliefState> turn_beliefs;

    // Set when a Booking-Book action could not inherit a venue domain; such
    // dialogues are excluded from audits and listed in reports.
    bool booking_domain_unknown = false;

    bool operator==(const DialogueRecord&) const = default;
};

// Counters accumulated while loading and transforming; echoed into reports.
struct CorpusStats {
    long long total_in_source = 0;
    long long parsed = 0;
    long long skipped = 0;
    long long belief_deletions = 0;        // belief slots that disappeared (non-events)
    long long merged_turns = 0;            // consecutive same-speaker turns merged
    long long dropped_leading_system = 0;  // system turns before the first user turn
    long long dropped_trailing_user = 0;   // user turns with no following action
    long long tagged_utterances = 0;
    long long regex_domain_mismatch = 0;   // utterances where regex domain != dialogue domain
    std::vector<std::string> unknown_booking_ids;

    bool operator==(const CorpusStats&) const = default;
};

struct Vocabulary {
    std::set<std::string> domains;
    std::set<std::string> act_types;
    std::set<std::string> slot_names;
    std::set<std::string> intents;
    std::set<std::string> statuses;

    bool operator==(const Vocabulary&) const = default;
};

struct Corpus {
    std::vector<DialogueRecord> dialogues;
    Vocabulary vocab;
    std::vector<std::string> stage_log;  // applied canonicalization stages, append-only
    CorpusStats stats;

    bool operator==(const Corpus&) const = default;
};

// ---- operations ----------------------------------------------------------

// Maps a raw slot value to its generic tag: "dontcare"/"don't care" becomes
// do-not-care, anything else specific.
std::string slot_tag_for_value(const std::string& raw_value);

// Builds a CanonicalLabel from raw annotation parts. Slot names are
// lowercased, whitespace becomes '_', and names get domain-qualified
// (Area under Hotel -> hotel_area). Values map to tags; duplicate names
// collapse keeping the first tag. Throws InputError on empty domain/act.
CanonicalLabel parse_action_label(const std::string& raw_domain, const std::string& raw_act,
                                  const std::vector<std::pair<std::string, std::string>>& raw_slots);

// Single-line canonical form of one event, marker included:
//   * inform{"hotel_area": "specific"}
//   - slot{"hotel_status": "unique"}
//   - Hotel-Booking-Book{"hotel_reference": "specific"}
std::string serialize_event(const Event& event);
Event deserialize_event(const std::string& line);

// Canonical text block: user lines flush left, system lines indented.
// Carries the event sequence only; id/provenance live in the JSON encoding.
std::string serialize_dialogue(const DialogueRecord& d);
DialogueRecord deserialize_dialogue(const std::string& text, const std::string& id = "",
                                    const std::string& source = "");

// Checks the DialogueRecord turn-structure invariants; throws InternalError
// naming the record and the violated rule.
void validate_dialogue(const DialogueRecord& d);

// Rebuilds corpus.vocab from the dialogues.
void refresh_vocab(Corpus& corpus);

// History windows. The key is the canonical serialization of the last
// min(k, position) events, newline-joined, so hashing and equality are
// stable across runs.
using HistoryKey = std::string;
HistoryKey window(const std::vector<Event>& events, size_t position, size_t k);

}  // namespace dialaudit
