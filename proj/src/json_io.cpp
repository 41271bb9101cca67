#include "dialaudit/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dialaudit/hash.hpp"
#include "dialaudit/version.hpp"

namespace dialaudit {

namespace {

json slots_to_json(const SlotTags& slots) {
    json obj = json::object();
    for (const auto& [name, tag] : slots) obj[name] = tag;
    return obj;
}

SlotTags slots_from_json(const json& obj) {
    SlotTags slots;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        slots.emplace_back(it.key(), it.value().get<std::string>());
    return slots;  // nlohmann objects iterate in key order
}

const json& require(const json& j, const char* field, const char* what) {
    auto it = j.find(field);
    if (it == j.end())
        throw InputError(std::string(what) + " is missing required field '" + field + "'");
    return *it;
}

}  // namespace

json to_json(const Event& event) {
    json j;
    switch (event.kind()) {
        case Event::Kind::User:
            j["kind"] = "user";
            j["intent"] = event.user().intent;
            j["slots"] = slots_to_json(event.user().slots);
            break;
        case Event::Kind::KbStatus:
            j["kind"] = "kb_status";
            j["domain"] = event.kb_status().domain;
            j["status"] = event.kb_status().status;
            break;
        case Event::Kind::Action:
            j["kind"] = "action";
            j["domain"] = event.action().domain;
            j["act_type"] = event.action().act_type;
            j["slots"] = slots_to_json(event.action().slots);
            break;
    }
    return j;
}

Event event_from_json(const json& j) {
    std::string kind = require(j, "kind", "event").get<std::string>();
    if (kind == "user")
        return Event::make_user(require(j, "intent", "user event").get<std::string>(),
                                slots_from_json(require(j, "slots", "user event")));
    if (kind == "kb_status")
        return Event::make_kb_status(require(j, "domain", "kb_status event").get<std::string>(),
                                     require(j, "status", "kb_status event").get<std::string>());
    if (kind == "action") {
        CanonicalLabel label;
        label.domain = require(j, "domain", "action event").get<std::string>();
        label.act_type = require(j, "act_type", "action event").get<std::string>();
        label.slots = slots_from_json(require(j, "slots", "action event"));
        return Event::make_action(std::move(label));
    }
    throw InputError("unknown event kind '" + kind + "'");
}

json to_json(const DialogueRecord& d) {
    json j;
    j["id"] = d.id;
    j["source"] = d.source;
    j["annotation_complete"] = d.annotation_complete;
    j["domains"] = d.domains;
    json events = json::array();
    for (const auto& e : d.events) events.push_back(to_json(e));
    j["events"] = std::move(events);
    if (!d.turn_beliefs.empty()) j["turn_beliefs"] = d.turn_beliefs;
    if (d.booking_domain_unknown) j["booking_domain_unknown"] = true;
    return j;
}

DialogueRecord dialogue_from_json(const json& j) {
    DialogueRecord d;
    d.id = require(j, "id", "dialogue").get<std::string>();
    d.source = j.value("source", "");
    d.annotation_complete = j.value("annotation_complete", true);
    if (j.contains("domains"))
        d.domains = j["domains"].get<std::set<std::string>>();
    for (const auto& e : require(j, "events", "dialogue")) d.events.push_back(event_from_json(e));
    if (j.contains("turn_beliefs")) d.turn_beliefs = j["turn_beliefs"].get<std::vector<BeliefState>>();
    d.booking_domain_unknown = j.value("booking_domain_unknown", false);
    return d;
}

json to_json(const CorpusStats& stats) {
    json j;
    j["total_in_source"] = stats.total_in_source;
    j["parsed"] = stats.parsed;
    j["skipped"] = stats.skipped;
    j["belief_deletions"] = stats.belief_deletions;
    j["merged_turns"] = stats.merged_turns;
    j["dropped_leading_system"] = stats.dropped_leading_system;
    j["dropped_trailing_user"] = stats.dropped_trailing_user;
    j["tagged_utterances"] = stats.tagged_utterances;
    j["regex_domain_mismatch"] = stats.regex_domain_mismatch;
    j["unknown_booking_ids"] = stats.unknown_booking_ids;
    return j;
}

CorpusStats corpus_stats_from_json(const json& j) {
    CorpusStats stats;
    stats.total_in_source = j.value("total_in_source", 0ll);
    stats.parsed = j.value("parsed", 0ll);
    stats.skipped = j.value("skipped", 0ll);
    stats.belief_deletions = j.value("belief_deletions", 0ll);
    stats.merged_turns = j.value("merged_turns", 0ll);
    stats.dropped_leading_system = j.value("dropped_leading_system", 0ll);
    stats.dropped_trailing_user = j.value("dropped_trailing_user", 0ll);
    stats.tagged_utterances = j.value("tagged_utterances", 0ll);
    stats.regex_domain_mismatch = j.value("regex_domain_mismatch", 0ll);
    if (j.contains("unknown_booking_ids"))
        stats.unknown_booking_ids = j["unknown_booking_ids"].get<std::vector<std::string>>();
    return stats;
}

json to_json(const Corpus& corpus) {
    json j;
    j["format_version"] = kCorpusFormatVersion;
    j["stage_log"] = corpus.stage_log;
    j["stats"] = to_json(corpus.stats);
    json vocab;
    vocab["domains"] = corpus.vocab.domains;
    vocab["act_types"] = corpus.vocab.act_types;
    vocab["slot_names"] = corpus.vocab.slot_names;
    vocab["intents"] = corpus.vocab.intents;
    vocab["statuses"] = corpus.vocab.statuses;
    j["vocab"] = std::move(vocab);
    json dialogues = json::array();
    for (const auto& d : corpus.dialogues) dialogues.push_back(to_json(d));
    j["dialogues"] = std::move(dialogues);
    return j;
}

Corpus corpus_from_json(const json& j) {
    int version = j.value("format_version", 0);
    if (version != kCorpusFormatVersion)
        throw InputError("unsupported corpus format_version " + std::to_string(version));
    Corpus corpus;
    if (j.contains("stage_log")) corpus.stage_log = j["stage_log"].get<std::vector<std::string>>();
    if (j.contains("stats")) corpus.stats = corpus_stats_from_json(j["stats"]);
    for (const auto& d : require(j, "dialogues", "corpus")) {
        corpus.dialogues.push_back(dialogue_from_json(d));
        validate_dialogue(corpus.dialogues.back());
    }
    refresh_vocab(corpus);
    return corpus;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write file: " + tmp);
        out << content;
        if (!out) throw InputError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw InputError("cannot rename " + tmp + " to " + path);
    }
}

Corpus load_corpus_file(const std::string& path) {
    return corpus_from_json(load_json_file(path));
}

void save_corpus_file(const Corpus& corpus, const std::string& path) {
    write_file_atomic(path, to_json(corpus).dump(2) + "\n");
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return hex;
}

}  // namespace dialaudit
