#include "dialaudit/canonicalize.hpp"

#include <algorithm>

namespace dialaudit {

namespace {

bool stage_applied(const Corpus& corpus, const std::string& stage) {
    return std::find(corpus.stage_log.begin(), corpus.stage_log.end(), stage) !=
           corpus.stage_log.end();
}

bool is_reqmore(const Event& e) {
    return e.kind() == Event::Kind::Action && e.action().domain == "general" &&
           e.action().act_type == "Reqmore";
}

}  // namespace

StageConfig StageConfig::defaults() {
    StageConfig cfg;
    cfg.merge_table = {{"Inform", "Reply"},   {"Recommend", "Reply"}, {"Select", "Reply"},
                       {"Request", "Reply"},  {"Goodbye", "Welcome"}, {"Welcome", "Welcome"},
                       {"Greet", "Welcome"}};
    return cfg;
}

nlohmann::json StageConfig::to_json() const {
    nlohmann::json j;
    j["status_slots"] = status_slots;
    j["merge_labels"] = merge_labels;
    j["drop_reqmore"] = drop_reqmore;
    j["merge_table"] = merge_table;
    return j;
}

StageConfig StageConfig::from_json(const nlohmann::json& j) {
    StageConfig cfg = defaults();
    cfg.status_slots = j.value("status_slots", cfg.status_slots);
    cfg.merge_labels = j.value("merge_labels", cfg.merge_labels);
    cfg.drop_reqmore = j.value("drop_reqmore", cfg.drop_reqmore);
    if (j.contains("merge_table"))
        cfg.merge_table = j["merge_table"].get<std::map<std::string, std::string>>();
    return cfg;
}

Corpus add_status_slots(const Corpus& corpus, const KbTables& kb) {
    if (stage_applied(corpus, kStageStatusSlots)) return corpus;
    Corpus out = corpus;
    for (auto& d : out.dialogues) {
        if (d.turn_beliefs.empty()) continue;
        std::vector<Event> events;
        std::map<std::string, std::string> last_status;  // implicit default: available
        std::set<std::string> booked;
        size_t user_index = 0;
        for (const Event& e : d.events) {
            switch (e.kind()) {
                case Event::Kind::KbStatus:
                    break;  // rebuilt below
                case Event::Kind::User: {
                    events.push_back(e);
                    if (user_index >= d.turn_beliefs.size())
                        throw InternalError("dialogue '" + d.id +
                                            "': more user events than turn beliefs");
                    const BeliefState& belief = d.turn_beliefs[user_index++];
                    for (const auto& [domain, slots] : belief) {
                        if (slots.empty() || !kb.count(domain)) continue;
                        std::string status = booked.count(domain)
                                                 ? kStatusBooked
                                                 : query_kb_status(belief, domain, kb);
                        auto it = last_status.find(domain);
                        std::string previous =
                            it == last_status.end() ? kStatusAvailable : it->second;
                        if (status != previous) {
                            events.push_back(Event::make_kb_status(domain, status));
                            last_status[domain] = status;
                        }
                    }
                    break;
                }
                case Event::Kind::Action: {
                    CanonicalLabel label = e.action();
                    if (label.act_type == "Booking-Book" && kb.count(label.domain)) {
                        std::string slot_name = label.domain + "_status";
                        bool present = std::any_of(label.slots.begin(), label.slots.end(),
                                                   [&](const auto& s) { return s.first == slot_name; });
                        if (!present) {
                            label.slots.emplace_back(slot_name, kStatusBooked);
                            std::sort(label.slots.begin(), label.slots.end());
                        }
                        booked.insert(label.domain);
                        last_status[label.domain] = kStatusBooked;
                    }
                    events.push_back(Event::make_action(std::move(label)));
                    break;
                }
            }
        }
        d.events = std::move(events);
        validate_dialogue(d);
    }
    out.stage_log.push_back(kStageStatusSlots);
    refresh_vocab(out);
    return out;
}

Corpus merge_labels(const Corpus& corpus, const StageConfig& cfg) {
    if (stage_applied(corpus, kStageMergeLabels)) return corpus;
    Corpus out = corpus;
    for (auto& d : out.dialogues) {
        for (auto& e : d.events) {
            if (e.kind() != Event::Kind::Action) continue;
            CanonicalLabel& label = std::get<CanonicalLabel>(e.payload);
            auto it = cfg.merge_table.find(label.act_type);
            if (it != cfg.merge_table.end()) label.act_type = it->second;
        }
    }
    out.stage_log.push_back(kStageMergeLabels);
    refresh_vocab(out);
    return out;
}

Corpus drop_reqmore(const Corpus& corpus) {
    if (stage_applied(corpus, kStageDropReqmore)) return corpus;
    Corpus out = corpus;
    for (auto& d : out.dialogues) {
        // Segment = the actions between one user event and the next; drop
        // Reqmore only when the segment has another action.
        std::vector<Event> events;
        size_t i = 0;
        while (i < d.events.size()) {
            if (d.events[i].kind() != Event::Kind::Action) {
                events.push_back(d.events[i]);
                ++i;
                continue;
            }
            size_t start = i;
            bool has_other = false;
            while (i < d.events.size() && d.events[i].kind() == Event::Kind::Action) {
                if (!is_reqmore(d.events[i])) has_other = true;
                ++i;
            }
            for (size_t p = start; p < i; ++p)
                if (!has_other || !is_reqmore(d.events[p])) events.push_back(d.events[p]);
        }
        d.events = std::move(events);
        validate_dialogue(d);
    }
    out.stage_log.push_back(kStageDropReqmore);
    refresh_vocab(out);
    return out;
}

Corpus append_end_of_turn_markers(const Corpus& corpus) {
    if (stage_applied(corpus, kStageEndOfTurn)) return corpus;
    CanonicalLabel marker;
    marker.domain = "general";
    marker.act_type = "EndOfTurn";
    Corpus out = corpus;
    for (auto& d : out.dialogues) {
        std::vector<Event> events;
        for (size_t i = 0; i < d.events.size(); ++i) {
            events.push_back(d.events[i]);
            bool turn_end = d.events[i].kind() == Event::Kind::Action &&
                            (i + 1 == d.events.size() ||
                             d.events[i + 1].kind() != Event::Kind::Action);
            if (turn_end) events.push_back(Event::make_action(marker));
        }
        d.events = std::move(events);
    }
    out.stage_log.push_back(kStageEndOfTurn);
    refresh_vocab(out);
    return out;
}

Corpus apply_stages(const Corpus& corpus, const StageConfig& cfg, const KbTables* kb) {
    Corpus out = corpus;
    if (cfg.status_slots) {
        bool needs_kb = std::any_of(out.dialogues.begin(), out.dialogues.end(),
                                    [](const auto& d) { return !d.turn_beliefs.empty(); });
        if (needs_kb && !kb)
            throw InputError("status_slots stage needs KB tables; pass the dataset directory");
        static const KbTables empty;
        out = add_status_slots(out, kb ? *kb : empty);
    }
    if (cfg.merge_labels) out = merge_labels(out, cfg);
    if (cfg.drop_reqmore) out = drop_reqmore(out);
    return out;
}

}  // namespace dialaudit
