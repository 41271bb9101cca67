#include "dialaudit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dialaudit {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string capitalized(const std::string& token) {
    if (token.empty()) return token;
    std::string out = token;
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

void append_slots(std::string& out, const SlotTags& slots) {
    out += '{';
    bool first = true;
    for (const auto& [name, tag] : slots) {
        if (!first) out += ", ";
        first = false;
        out += '"';
        out += name;
        out += "\": \"";
        out += tag;
        out += '"';
    }
    out += '}';
}

// Parses `"name": "tag"` pairs between braces. Input is our own canonical
// output, so parsing is strict.
SlotTags parse_slot_block(const std::string& text, const std::string& context) {
    SlotTags slots;
    size_t i = 0;
    auto fail = [&](const std::string& what) -> void {
        throw InputError("malformed " + context + " slot block: " + what + " in '" + text + "'");
    };
    auto read_quoted = [&]() -> std::string {
        if (i >= text.size() || text[i] != '"') fail("expected '\"'");
        ++i;
        size_t start = i;
        while (i < text.size() && text[i] != '"') ++i;
        if (i >= text.size()) fail("unterminated string");
        std::string value = text.substr(start, i - start);
        ++i;
        return value;
    };
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
        if (i >= text.size()) break;
        std::string name = read_quoted();
        while (i < text.size() && (text[i] == ' ' || text[i] == ':')) ++i;
        std::string tag = read_quoted();
        slots.emplace_back(std::move(name), std::move(tag));
    }
    return slots;
}

// Splits "intent{...}" / "Label{...}" into head and optional slot block.
std::pair<std::string, SlotTags> split_head_slots(const std::string& body, const std::string& context) {
    size_t brace = body.find('{');
    if (brace == std::string::npos) return {body, {}};
    if (body.back() != '}')
        throw InputError("malformed " + context + " line (missing '}'): '" + body + "'");
    std::string head = body.substr(0, brace);
    std::string inner = body.substr(brace + 1, body.size() - brace - 2);
    return {head, parse_slot_block(inner, context)};
}

}  // namespace

Event Event::make_user(std::string intent, SlotTags slots) {
    return Event{UserEvent{std::move(intent), std::move(slots)}};
}

Event Event::make_kb_status(std::string domain, std::string status) {
    return Event{KbStatusEvent{std::move(domain), std::move(status)}};
}

Event Event::make_action(CanonicalLabel label) {
    return Event{std::move(label)};
}

std::string CanonicalLabel::key() const {
    std::string out = capitalized(domain);
    out += '-';
    out += act_type;
    if (!slots.empty()) append_slots(out, slots);
    return out;
}

std::string slot_tag_for_value(const std::string& raw_value) {
    std::string v = lower(raw_value);
    if (v == "dontcare" || v == "don't care" || v == "dont care") return kTagDoNotCare;
    return kTagSpecific;
}

CanonicalLabel parse_action_label(const std::string& raw_domain, const std::string& raw_act,
                                  const std::vector<std::pair<std::string, std::string>>& raw_slots) {
    if (raw_domain.empty() || raw_act.empty())
        throw InputError("malformed action label: empty domain or act type in ('" + raw_domain +
                         "', '" + raw_act + "', " + std::to_string(raw_slots.size()) + " slots)");
    CanonicalLabel label;
    label.domain = lower(raw_domain);
    label.act_type = raw_act;
    for (const auto& [raw_name, raw_value] : raw_slots) {
        std::string name = lower(raw_name);
        std::replace(name.begin(), name.end(), ' ', '_');
        if (name.empty() || name == "none") continue;
        name = label.domain + "_" + name;
        std::string tag = slot_tag_for_value(raw_value);
        // first tag wins on duplicates
        bool seen = false;
        for (const auto& [existing, _] : label.slots)
            if (existing == name) { seen = true; break; }
        if (!seen) label.slots.emplace_back(std::move(name), std::move(tag));
    }
    std::sort(label.slots.begin(), label.slots.end());
    return label;
}

std::string serialize_event(const Event& event) {
    switch (event.kind()) {
        case Event::Kind::User: {
            const auto& u = event.user();
            std::string out = "* ";
            out += u.intent;
            if (!(u.slots.empty() && u.intent == "bye")) append_slots(out, u.slots);
            return out;
        }
        case Event::Kind::KbStatus: {
            const auto& s = event.kb_status();
            std::string out = "- slot{\"";
            out += s.domain;
            out += "_status\": \"";
            out += s.status;
            out += "\"}";
            return out;
        }
        case Event::Kind::Action:
            return "- " + event.action().key();
    }
    throw InternalError("unreachable event kind");
}

Event deserialize_event(const std::string& line) {
    if (line.rfind("* ", 0) == 0) {
        auto [intent, slots] = split_head_slots(line.substr(2), "user");
        if (intent.empty()) throw InputError("empty user intent in line '" + line + "'");
        return Event::make_user(intent, std::move(slots));
    }
    if (line.rfind("- ", 0) == 0) {
        std::string body = line.substr(2);
        if (body.rfind("slot{", 0) == 0) {
            auto [head, slots] = split_head_slots(body, "kb status");
            if (slots.size() != 1)
                throw InputError("kb status line must carry exactly one slot: '" + line + "'");
            const auto& [name, value] = slots.front();
            const std::string suffix = "_status";
            if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
                throw InputError("kb status slot name must end in _status: '" + line + "'");
            return Event::make_kb_status(name.substr(0, name.size() - suffix.size()), value);
        }
        auto [head, slots] = split_head_slots(body, "action");
        size_t dash = head.find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 >= head.size())
            throw InputError("action label must be Domain-ActType: '" + line + "'");
        CanonicalLabel label;
        label.domain = lower(head.substr(0, dash));
        label.act_type = head.substr(dash + 1);
        label.slots = std::move(slots);
        return Event::make_action(std::move(label));
    }
    throw InputError("unrecognized event line: '" + line + "'");
}

std::string serialize_dialogue(const DialogueRecord& d) {
    std::string out;
    for (const Event& e : d.events) {
        if (e.kind() != Event::Kind::User) out += "  ";
        out += serialize_event(e);
        out += '\n';
    }
    return out;
}

DialogueRecord deserialize_dialogue(const std::string& text, const std::string& id,
                                    const std::string& source) {
    DialogueRecord d;
    d.id = id;
    d.source = source;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t start = line.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        d.events.push_back(deserialize_event(line.substr(start)));
    }
    for (const Event& e : d.events)
        if (e.kind() == Event::Kind::Action && e.action().domain != "general")
            d.domains.insert(e.action().domain);
    return d;
}

void validate_dialogue(const DialogueRecord& d) {
    auto fail = [&](const std::string& rule) {
        throw InternalError("dialogue '" + d.id + "' violates invariant: " + rule);
    };
    if (d.events.empty()) fail("events non-empty");
    if (d.events.front().kind() != Event::Kind::User) fail("events begin with a user event");
    // Every user event must be followed by >=1 action before the next user
    // event; kb_status events may only sit between a user event and the
    // following actions.
    bool saw_action_since_user = true;
    bool actions_started = false;
    for (size_t i = 0; i < d.events.size(); ++i) {
        switch (d.events[i].kind()) {
            case Event::Kind::User:
                if (i > 0 && !saw_action_since_user) fail("user event without preceding system action");
                saw_action_since_user = false;
                actions_started = false;
                break;
            case Event::Kind::KbStatus:
                if (actions_started) fail("kb_status event after the turn's actions");
                break;
            case Event::Kind::Action:
                saw_action_since_user = true;
                actions_started = true;
                break;
        }
    }
    if (!saw_action_since_user) fail("trailing user event without system action");
}

void refresh_vocab(Corpus& corpus) {
    Vocabulary v;
    for (const auto& d : corpus.dialogues) {
        for (const auto& e : d.events) {
            switch (e.kind()) {
                case Event::Kind::User:
                    v.intents.insert(e.user().intent);
                    for (const auto& [name, _] : e.user().slots) v.slot_names.insert(name);
                    break;
                case Event::Kind::KbStatus:
                    v.domains.insert(e.kb_status().domain);
                    v.statuses.insert(e.kb_status().status);
                    break;
                case Event::Kind::Action:
                    v.domains.insert(e.action().domain);
                    v.act_types.insert(e.action().act_type);
                    for (const auto& [name, _] : e.action().slots) v.slot_names.insert(name);
                    break;
            }
        }
    }
    corpus.vocab = std::move(v);
}

HistoryKey window(const std::vector<Event>& events, size_t position, size_t k) {
    if (position > events.size())
        throw InputError("window position " + std::to_string(position) + " out of range (size " +
                         std::to_string(events.size()) + ")");
    if (k < 1) throw InputError("window size k must be >= 1");
    size_t take = std::min(k, position);
    std::string key;
    for (size_t i = position - take; i < position; ++i) {
        if (!key.empty()) key += '\n';
        key += serialize_event(events[i]);
    }
    return key;
}

}  // namespace dialaudit
