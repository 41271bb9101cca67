#pragma once

// AuditReport assembly and rendering. A report is a deterministic JSON
// document: identical inputs + config + version give byte-identical output.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialaudit/ambiguity.hpp"
#include "dialaudit/corpus.hpp"
#include "dialaudit/metrics.hpp"

namespace dialaudit {

struct ReportBuilder {
    nlohmann::json report;

    ReportBuilder();

    void set_config(const nlohmann::json& config_echo);
    void add_input(const std::string& name, const std::string& path);  // records path + digest
    void set_corpus(const Corpus& corpus);
    void set_conflicts(const std::vector<Conflict>& conflicts, size_t top_n);
    void set_prune(const PruneResult& result, size_t k);
    void add_scores(const std::vector<ScoreRow>& rows);
    void set_probe(const ProbeResult& probe);
    void set_excluded(const std::vector<std::string>& ids);  // flagged dialogues left out
    void add_note(const std::string& note);

    std::string to_json_text() const;
};

// Renderers; both carry the same numbers as the JSON (scores at 4 decimals).
std::string render_markdown(const nlohmann::json& report);
std::string render_csv(const nlohmann::json& report);

}  // namespace dialaudit
