#include "dialaudit/taskmaster.hpp"

#include <algorithm>

#include "dialaudit/json_io.hpp"

namespace dialaudit {

namespace {

// Built-in copy of data/taskmaster_domain_rules.json.
const char* kDefaultRulesJson = R"({
  "version": 1,
  "rules": [
    {"domain": "uber_lyft", "patterns": ["\\b(uber|lyft|rides?|drivers?|pickup|pick up|drop off)\\b"]},
    {"domain": "movie", "patterns": ["\\b(movies?|films?|theaters?|theatres?|cinemas?|showtimes?|showings?|tickets?)\\b"]},
    {"domain": "restaurant", "patterns": ["\\b(restaurants?|reservations?|tables?|dinner|lunch|dining)\\b"]},
    {"domain": "coffee", "patterns": ["\\b(coffees?|lattes?|espressos?|cappuccinos?|mochas?|cafes?)\\b"]},
    {"domain": "pizza", "patterns": ["\\b(pizzas?|toppings?|pepperoni|crusts?|pizzerias?)\\b"]},
    {"domain": "auto_repair", "patterns": ["\\b(cars?|repairs?|mechanics?|oil change|brakes?|engines?|tires?)\\b"]}
  ]
})";

// Dialogue domain from the instruction id, e.g. "pizza-ordering-2" -> pizza.
std::string dialogue_domain_from_instruction(const std::string& instruction_id) {
    static const std::vector<std::pair<std::string, std::string>> keywords = {
        {"uber", "uber_lyft"}, {"lyft", "uber_lyft"},   {"movie", "movie"},
        {"restaurant", "restaurant"}, {"coffee", "coffee"}, {"pizza", "pizza"},
        {"auto", "auto_repair"}};
    for (const auto& [needle, domain] : keywords)
        if (instruction_id.find(needle) != std::string::npos) return domain;
    return "none";
}

std::vector<SegmentAnnotation> segments_from_json(const json& utterance) {
    std::vector<SegmentAnnotation> segments;
    if (!utterance.contains("segments") || !utterance["segments"].is_array()) return segments;
    for (const auto& seg : utterance["segments"]) {
        if (!seg.contains("start_index") || !seg.contains("end_index") ||
            !seg.contains("annotations"))
            continue;
        size_t start = seg["start_index"].get<size_t>();
        size_t end = seg["end_index"].get<size_t>();
        for (const auto& ann : seg["annotations"]) {
            if (ann.contains("name") && ann["name"].is_string())
                segments.push_back(SegmentAnnotation{start, end, ann["name"].get<std::string>()});
        }
    }
    return segments;
}

struct Turn {
    bool is_user = false;
    std::string text;
    std::vector<SegmentAnnotation> segments;
};

SlotTags segment_slots(const std::vector<SegmentAnnotation>& segments) {
    SlotTags slots;
    for (const auto& s : segments) {
        bool seen = std::any_of(slots.begin(), slots.end(),
                                [&](const auto& slot) { return slot.first == s.label; });
        if (!seen) slots.emplace_back(s.label, kTagSpecific);
    }
    std::sort(slots.begin(), slots.end());
    return slots;
}

void build_events(DialogueRecord& d, const std::vector<Turn>& turns, const std::string& domain,
                  const DomainRegexRules& rules, CorpusStats& stats) {
    for (size_t t = 0; t < turns.size(); ++t) {
        const Turn& turn = turns[t];
        delexicalize(turn.text, turn.segments);  // validates the spans
        if (turn.is_user) {
            SlotTags slots = segment_slots(turn.segments);
            bool last_user = true;
            for (size_t rest = t + 1; rest < turns.size(); ++rest)
                if (turns[rest].is_user) { last_user = false; break; }
            std::string intent = (last_user && slots.empty()) ? "bye" : "inform";
            d.events.push_back(Event::make_user(intent, std::move(slots)));
        } else {
            CanonicalLabel label = tag_utterance(turn.text, domain, turn.segments, rules);
            ++stats.tagged_utterances;
            if (label.act_type != domain) ++stats.regex_domain_mismatch;
            d.events.push_back(Event::make_action(std::move(label)));
        }
    }
}

}  // namespace

DomainRegexRules DomainRegexRules::defaults() {
    return from_json(json::parse(kDefaultRulesJson));
}

DomainRegexRules DomainRegexRules::from_json(const nlohmann::json& j) {
    DomainRegexRules rules;
    rules.version_ = j.value("version", 0);
    if (!j.contains("rules") || !j["rules"].is_array())
        throw InputError("domain rules file needs a 'rules' array");
    for (const auto& rj : j["rules"]) {
        Rule rule;
        rule.domain = rj.at("domain").get<std::string>();
        for (const auto& p : rj.at("patterns")) {
            try {
                rule.patterns.emplace_back(p.get<std::string>(),
                                           std::regex::ECMAScript | std::regex::icase);
            } catch (const std::regex_error& e) {
                throw InputError("bad regex for domain '" + rule.domain + "': " + e.what());
            }
        }
        rules.rules_.push_back(std::move(rule));
    }
    return rules;
}

DomainRegexRules DomainRegexRules::load(const std::string& path) {
    return from_json(load_json_file(path));
}

std::string DomainRegexRules::classify(const std::string& utterance) const {
    for (const auto& rule : rules_)
        for (const auto& pattern : rule.patterns)
            if (std::regex_search(utterance, pattern)) return rule.domain;
    return "none";
}

std::string delexicalize(const std::string& utterance,
                         const std::vector<SegmentAnnotation>& segments) {
    for (const auto& s : segments)
        if (s.start >= s.end || s.end > utterance.size())
            throw InputError("segment span [" + std::to_string(s.start) + "," +
                             std::to_string(s.end) + ") outside utterance of length " +
                             std::to_string(utterance.size()));

    // Sort by start; on overlap keep the longer span.
    std::vector<SegmentAnnotation> sorted = segments;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end > b.end;  // longer first
        return a.label < b.label;
    });
    std::vector<SegmentAnnotation> kept;
    for (const auto& s : sorted) {
        if (!kept.empty() && s.start < kept.back().end) {
            if (s.end - s.start > kept.back().end - kept.back().start) kept.back() = s;
            continue;
        }
        kept.push_back(s);
    }

    std::string out = utterance;
    for (auto it = kept.rbegin(); it != kept.rend(); ++it)
        out.replace(it->start, it->end - it->start, "<" + it->label + ">");
    return out;
}

CanonicalLabel tag_utterance(const std::string& utterance, const std::string& dialogue_domain,
                             const std::vector<SegmentAnnotation>& segments,
                             const DomainRegexRules& rules) {
    CanonicalLabel label;
    label.domain = dialogue_domain;
    label.act_type = rules.classify(utterance);
    label.slots = segment_slots(segments);
    return label;
}

TaskmasterLoadResult load_taskmaster(const std::string& path, const DomainRegexRules& rules) {
    json data = load_json_file(path);
    if (!data.is_array())
        throw InputError("taskmaster file must be a conversation array: " + path);

    TaskmasterLoadResult result;
    CorpusStats& stats = result.corpus.stats;
    stats.total_in_source = static_cast<long long>(data.size());

    for (const auto& conv : data) {
        if (!conv.is_object() || !conv.contains("utterances") || !conv["utterances"].is_array() ||
            conv["utterances"].empty()) {
            ++result.skipped;
            continue;
        }
        std::string id = conv.value("conversation_id", "");
        std::string instruction = conv.value("instruction_id", "");
        std::string domain = dialogue_domain_from_instruction(instruction);

        // Collect turns, merging consecutive same-speaker utterances.
        std::vector<Turn> turns;
        bool malformed = false;
        for (const auto& u : conv["utterances"]) {
            if (!u.contains("speaker") || !u.contains("text")) { malformed = true; break; }
            std::string speaker = u["speaker"].get<std::string>();
            Turn turn;
            turn.is_user = (speaker == "USER" || speaker == "user");
            turn.text = u["text"].get<std::string>();
            turn.segments = segments_from_json(u);
            if (!turns.empty() && turns.back().is_user == turn.is_user) {
                size_t offset = turns.back().text.size() + 1;
                turns.back().text += " " + turn.text;
                for (auto& s : turn.segments) {
                    s.start += offset;
                    s.end += offset;
                }
                turns.back().segments.insert(turns.back().segments.end(), turn.segments.begin(),
                                             turn.segments.end());
                ++stats.merged_turns;
            } else {
                turns.push_back(std::move(turn));
            }
        }
        if (malformed) { ++result.skipped; continue; }

        while (!turns.empty() && !turns.front().is_user) {
            turns.erase(turns.begin());
            ++stats.dropped_leading_system;
        }
        while (!turns.empty() && turns.back().is_user) {
            turns.pop_back();
            ++stats.dropped_trailing_user;
        }
        if (turns.size() < 2) { ++result.skipped; continue; }

        DialogueRecord d;
        d.id = id.empty() ? instruction : id;
        d.source = "taskmaster";
        d.domains.insert(domain);
        try {
            build_events(d, turns, domain, rules, stats);
        } catch (const InputError&) {
            ++result.skipped;
            continue;
        }
        validate_dialogue(d);
        result.corpus.dialogues.push_back(std::move(d));
    }

    stats.parsed = static_cast<long long>(result.corpus.dialogues.size());
    stats.skipped = result.skipped;
    refresh_vocab(result.corpus);
    return result;
}

}  // namespace dialaudit
