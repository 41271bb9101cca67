#pragma once

// JSON encoding of the event algebra (the interchange format between CLI
// invocations) and atomic file helpers. Events are tagged unions on "kind".

#include <string>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"

namespace dialaudit {

using json = nlohmann::json;

json to_json(const Event& event);
Event event_from_json(const json& j);

json to_json(const DialogueRecord& d);
DialogueRecord dialogue_from_json(const json& j);

json to_json(const CorpusStats& stats);
CorpusStats corpus_stats_from_json(const json& j);

json to_json(const Corpus& corpus);
Corpus corpus_from_json(const json& j);

// Reads and parses a JSON file; throws InputError with the path on failure.
json load_json_file(const std::string& path);

// Writes via temp file + rename in the same directory.
void write_file_atomic(const std::string& path, const std::string& content);

Corpus load_corpus_file(const std::string& path);
void save_corpus_file(const Corpus& corpus, const std::string& path);

// Hex digest of a file's bytes, for report input attribution.
std::string file_digest(const std::string& path);

}  // namespace dialaudit
