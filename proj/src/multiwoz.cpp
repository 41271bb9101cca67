#include "dialaudit/multiwoz.hpp"

#include <algorithm>
#include <cctype>

#include "dialaudit/json_io.hpp"

namespace dialaudit {

namespace {

const std::set<std::string> kVenueDomains = {"hotel",      "restaurant", "taxi",  "train",
                                             "attraction", "hospital",   "police"};

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// lowercase, trim, collapse internal whitespace
std::string normalize_value(const std::string& raw) {
    std::string out;
    bool pending_space = false;
    for (char raw_c : raw) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw_c)));
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) { out += ' '; pending_space = false; }
        out += c;
    }
    return out;
}

bool value_set(const std::string& normalized) {
    return !normalized.empty() && normalized != "not mentioned" && normalized != "none";
}

// Dataset act tokens -> the canonical act-type vocabulary. "bye" is the
// dataset's name for the farewell act (canonically Goodbye).
std::string normalize_act(const std::string& raw) {
    static const std::map<std::string, std::string> table = {
        {"inform", "Inform"},   {"request", "Request"}, {"recommend", "Recommend"},
        {"select", "Select"},   {"book", "Book"},       {"nobook", "NoBook"},
        {"nooffer", "NoOffer"}, {"offerbook", "OfferBook"}, {"offerbooked", "OfferBooked"},
        {"bye", "Goodbye"},     {"goodbye", "Goodbye"}, {"welcome", "Welcome"},
        {"greet", "Greet"},     {"reqmore", "Reqmore"}, {"thank", "Thank"}};
    auto it = table.find(lower(raw));
    if (it != table.end()) return it->second;
    std::string out = raw;
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

// Dataset slot abbreviations that the canonical vocabulary spells out.
std::string normalize_slot(const std::string& raw) {
    std::string s = lower(raw);
    if (s == "ref") return "reference";
    return s;
}

// metadata -> BeliefState: semi slots verbatim, book slots prefixed book_,
// the book.booked list skipped (system-side record, not a user constraint).
BeliefState extract_belief(const json& metadata) {
    BeliefState belief;
    for (auto dom = metadata.begin(); dom != metadata.end(); ++dom) {
        if (!dom.value().is_object()) continue;
        std::map<std::string, std::string> slots;
        auto add = [&](const std::string& name, const json& value, const std::string& prefix) {
            if (!value.is_string()) return;
            std::string normalized = normalize_value(value.get<std::string>());
            if (value_set(normalized)) slots[prefix + normalize_slot(name)] = normalized;
        };
        if (dom.value().contains("semi") && dom.value()["semi"].is_object())
            for (auto slot = dom.value()["semi"].begin(); slot != dom.value()["semi"].end(); ++slot)
                add(slot.key(), slot.value(), "");
        if (dom.value().contains("book") && dom.value()["book"].is_object())
            for (auto slot = dom.value()["book"].begin(); slot != dom.value()["book"].end(); ++slot)
                if (slot.key() != "booked") add(slot.key(), slot.value(), "book_");
        if (!slots.empty()) belief[lower(dom.key())] = std::move(slots);
    }
    return belief;
}

bool turn_annotated(const json& turn, const SchemaMap& schema) {
    auto it = turn.find(schema.acts_key);
    if (it == turn.end()) return false;
    return it->is_object() && !it->empty();
}

struct ParsedDialogue {
    DialogueRecord record;
    bool ok = false;
};

ParsedDialogue parse_dialogue(const std::string& id, const json& dialogue,
                              const SchemaMap& schema, CorpusStats& stats) {
    ParsedDialogue out;
    DialogueRecord& d = out.record;
    d.id = id;
    d.source = "multiwoz";

    auto log_it = dialogue.find("log");
    if (log_it == dialogue.end() || !log_it->is_array() || log_it->size() < 2) return out;
    const json& log = *log_it;

    size_t turn_count = log.size() / 2;  // user at even indices, system at odd
    for (size_t t = 0; t < turn_count; ++t) {
        const json& system_turn = log[2 * t + 1];
        if (!system_turn.is_object() || !system_turn.contains(schema.belief_key) ||
            !system_turn[schema.belief_key].is_object())
            return out;
        if (!turn_annotated(system_turn, schema)) return out;
    }

    BeliefState prev_belief;
    for (size_t t = 0; t < turn_count; ++t) {
        const json& system_turn = log[2 * t + 1];
        BeliefState next_belief = extract_belief(system_turn[schema.belief_key]);
        bool is_last = (t + 1 == turn_count);
        d.events.push_back(infer_user_event(prev_belief, next_belief, is_last,
                                            &stats.belief_deletions));
        d.turn_beliefs.push_back(next_belief);

        std::vector<CanonicalLabel> labels;
        for (auto act = system_turn[schema.acts_key].begin();
             act != system_turn[schema.acts_key].end(); ++act) {
            std::string key = act.key();
            size_t dash = key.find('-');
            if (dash == std::string::npos || dash == 0 || dash + 1 >= key.size()) return out;
            std::string raw_domain = key.substr(0, dash);
            std::string raw_act = normalize_act(key.substr(dash + 1));
            std::vector<std::pair<std::string, std::string>> raw_slots;
            if (act.value().is_array())
                for (const auto& pair : act.value())
                    if (pair.is_array() && pair.size() == 2 && pair[0].is_string() &&
                        pair[1].is_string())
                        raw_slots.emplace_back(normalize_slot(pair[0].get<std::string>()),
                                               pair[1].get<std::string>());
            if (lower(raw_domain) == "booking" && raw_act == "Book") {
                std::string venue = infer_booking_domain(d.events);
                if (venue == kUnknownDomain) d.booking_domain_unknown = true;
                labels.push_back(parse_action_label(venue, "Booking-Book", raw_slots));
            } else {
                labels.push_back(parse_action_label(raw_domain, raw_act, raw_slots));
            }
        }
        if (labels.empty()) return out;
        std::sort(labels.begin(), labels.end());
        for (auto& label : labels) {
            if (label.domain != "general") d.domains.insert(label.domain);
            d.events.push_back(Event::make_action(std::move(label)));
        }
        prev_belief = std::move(next_belief);
    }

    validate_dialogue(d);
    out.ok = true;
    return out;
}

void probe_schema(const json& data, const SchemaMap& schema, const std::string& path) {
    auto fail = [&](const std::string& what) {
        throw InputError("schema probe failed on " + path + ": " + what);
    };
    if (!data.is_object() || data.empty()) fail("expected a non-empty id->dialogue object");
    const json& first = data.begin().value();
    if (!first.is_object() || !first.contains("log") || !first["log"].is_array() ||
        first["log"].size() < 2)
        fail("dialogue '" + data.begin().key() + "' has no usable 'log' array");
    const json& log = first["log"];
    if (!log[0].contains(schema.text_key))
        fail("log entries lack text accessor '" + schema.text_key + "'");
    if (!log[1].contains(schema.belief_key))
        fail("system turns lack belief accessor '" + schema.belief_key + "'");
    for (const auto& [id, dialogue] : data.items()) {
        if (!dialogue.is_object() || !dialogue.contains("log")) continue;
        for (const auto& turn : dialogue["log"])
            if (turn.is_object() && turn.contains(schema.acts_key)) return;
    }
    fail("no dialogue carries act accessor '" + schema.acts_key + "'");
}

}  // namespace

bool is_venue_domain(const std::string& domain) { return kVenueDomains.count(domain) > 0; }

SchemaMap SchemaMap::multiwoz_default() {
    SchemaMap schema;
    schema.kb_files = {{"hotel", "hotel_db.json"},
                       {"restaurant", "restaurant_db.json"},
                       {"attraction", "attraction_db.json"},
                       {"train", "train_db.json"}};
    return schema;
}

nlohmann::json SchemaMap::to_json() const {
    nlohmann::json j;
    j["data_file"] = data_file;
    j["text_key"] = text_key;
    j["belief_key"] = belief_key;
    j["acts_key"] = acts_key;
    j["kb_files"] = kb_files;
    return j;
}

SchemaMap SchemaMap::from_json(const nlohmann::json& j) {
    SchemaMap schema = multiwoz_default();
    schema.data_file = j.value("data_file", schema.data_file);
    schema.text_key = j.value("text_key", schema.text_key);
    schema.belief_key = j.value("belief_key", schema.belief_key);
    schema.acts_key = j.value("acts_key", schema.acts_key);
    if (j.contains("kb_files"))
        schema.kb_files = j["kb_files"].get<std::map<std::string, std::string>>();
    return schema;
}

KbTables load_kb_tables(const std::string& dataset_dir, const SchemaMap& schema) {
    KbTables tables;
    for (const auto& [domain, file] : schema.kb_files) {
        std::string path = dataset_dir + "/" + file;
        json rows = load_json_file(path);
        if (!rows.is_array()) throw InputError("KB file is not an array: " + path);
        KbTable table;
        for (const auto& row : rows) {
            if (!row.is_object()) continue;
            std::map<std::string, std::string> columns;
            for (auto col = row.begin(); col != row.end(); ++col) {
                if (col.value().is_string())
                    columns[lower(col.key())] = normalize_value(col.value().get<std::string>());
                else if (col.value().is_number_integer())
                    columns[lower(col.key())] = std::to_string(col.value().get<long long>());
            }
            table.push_back(std::move(columns));
        }
        tables[lower(domain)] = std::move(table);
    }
    return tables;
}

Event infer_user_event(const BeliefState& prev_belief, const BeliefState& next_belief,
                       bool is_last_user_turn, long long* deletions) {
    SlotTags slots;
    for (const auto& [domain, next_slots] : next_belief) {
        auto prev_domain = prev_belief.find(domain);
        for (const auto& [slot, value] : next_slots) {
            bool changed = true;
            if (prev_domain != prev_belief.end()) {
                auto prev_slot = prev_domain->second.find(slot);
                changed = prev_slot == prev_domain->second.end() || prev_slot->second != value;
            }
            if (changed) slots.emplace_back(domain + "_" + slot, slot_tag_for_value(value));
        }
    }
    if (deletions) {
        for (const auto& [domain, prev_slots] : prev_belief) {
            auto next_domain = next_belief.find(domain);
            for (const auto& [slot, _] : prev_slots)
                if (next_domain == next_belief.end() || !next_domain->second.count(slot))
                    ++*deletions;
        }
    }
    std::sort(slots.begin(), slots.end());
    std::string intent = (is_last_user_turn && slots.empty()) ? "bye" : "inform";
    return Event::make_user(std::move(intent), std::move(slots));
}

std::string infer_booking_domain(const std::vector<Event>& history) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        switch (it->kind()) {
            case Event::Kind::Action:
                if (is_venue_domain(it->action().domain)) return it->action().domain;
                break;
            case Event::Kind::KbStatus:
                if (is_venue_domain(it->kb_status().domain)) return it->kb_status().domain;
                break;
            case Event::Kind::User:
                for (const auto& [name, _] : it->user().slots) {
                    size_t underscore = name.find('_');
                    if (underscore == std::string::npos) continue;
                    std::string prefix = name.substr(0, underscore);
                    if (is_venue_domain(prefix)) return prefix;
                }
                break;
        }
    }
    return kUnknownDomain;
}

std::string query_kb_status(const BeliefState& belief, const std::string& venue_domain,
                            const KbTables& kb) {
    auto table_it = kb.find(venue_domain);
    if (table_it == kb.end())
        throw InputError("no KB table configured for venue domain '" + venue_domain + "'");
    const KbTable& table = table_it->second;

    std::map<std::string, std::string> constraints;
    auto domain_it = belief.find(venue_domain);
    if (domain_it != belief.end()) {
        for (const auto& [slot, value] : domain_it->second) {
            if (slot_tag_for_value(value) == kTagDoNotCare) continue;  // unconstrained
            bool is_column = std::any_of(table.begin(), table.end(),
                                         [&](const auto& row) { return row.count(slot) > 0; });
            if (is_column) constraints[slot] = normalize_value(value);
        }
    }

    long long matches = 0;
    for (const auto& row : table) {
        bool match = true;
        for (const auto& [slot, value] : constraints) {
            auto cell = row.find(slot);
            if (cell == row.end() || cell->second != value) { match = false; break; }
        }
        if (match && ++matches >= 2) break;
    }
    if (matches == 0) return kStatusNA;
    return matches == 1 ? kStatusUnique : kStatusAvailable;
}

MultiwozLoadResult load_multiwoz(const std::string& dataset_dir, const SchemaMap& schema) {
    std::string data_path = dataset_dir + "/" + schema.data_file;
    json data = load_json_file(data_path);
    probe_schema(data, schema, data_path);

    MultiwozLoadResult result;
    result.corpus.stats.total_in_source = static_cast<long long>(data.size());
    for (auto it = data.begin(); it != data.end(); ++it) {
        ParsedDialogue parsed;
        try {
            parsed = parse_dialogue(it.key(), it.value(), schema, result.corpus.stats);
        } catch (const InputError&) {
            parsed.ok = false;
        }
        if (parsed.ok) {
            result.corpus.dialogues.push_back(std::move(parsed.record));
        } else {
            ++result.skipped;
        }
    }
    for (const auto& d : result.corpus.dialogues)
        if (d.booking_domain_unknown)
            result.corpus.stats.unknown_booking_ids.push_back(d.id);
    result.corpus.stats.parsed = static_cast<long long>(result.corpus.dialogues.size());
    result.corpus.stats.skipped = result.skipped;
    refresh_vocab(result.corpus);
    return result;
}

}  // namespace dialaudit
