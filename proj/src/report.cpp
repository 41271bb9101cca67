#include "dialaudit/report.hpp"

#include <cstdio>

#include "dialaudit/json_io.hpp"
#include "dialaudit/version.hpp"

namespace dialaudit {

namespace {

std::string fixed4(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

std::string stage_note(const nlohmann::json& stage_log) {
    if (!stage_log.is_array() || stage_log.empty()) return "initial";
    std::string out;
    for (const auto& s : stage_log) {
        if (!out.empty()) out += "+";
        out += s.get<std::string>();
    }
    return out;
}

}  // namespace

ReportBuilder::ReportBuilder() {
    report["report_version"] = kReportSchemaVersion;
    report["tool_version"] = kToolVersion;
    report["notes"] = nlohmann::json::array();
}

void ReportBuilder::set_config(const nlohmann::json& config_echo) { report["config"] = config_echo; }

void ReportBuilder::add_input(const std::string& name, const std::string& path) {
    report["inputs"][name] = {{"path", path}, {"fnv64", file_digest(path)}};
}

void ReportBuilder::set_corpus(const Corpus& corpus) {
    long long actions = 0, users = 0, statuses = 0;
    for (const auto& d : corpus.dialogues) {
        for (const auto& e : d.events) {
            switch (e.kind()) {
                case Event::Kind::User: ++users; break;
                case Event::Kind::KbStatus: ++statuses; break;
                case Event::Kind::Action: ++actions; break;
            }
        }
    }
    nlohmann::json c;
    c["dialogues"] = corpus.dialogues.size();
    c["actions"] = actions;
    c["user_events"] = users;
    c["kb_status_events"] = statuses;
    c["source_stats"] = to_json(corpus.stats);
    report["corpus"] = std::move(c);
    report["stage_log"] = corpus.stage_log;
}

void ReportBuilder::set_conflicts(const std::vector<Conflict>& conflicts, size_t top_n) {
    nlohmann::json c;
    c["count"] = conflicts.size();
    long long mass = 0;
    for (const auto& conflict : conflicts) mass += conflict.total();
    c["total_mass"] = mass;
    nlohmann::json top = nlohmann::json::array();
    for (size_t i = 0; i < conflicts.size() && i < top_n; ++i)
        top.push_back(conflicts[i].to_json(5));
    c["top"] = std::move(top);
    report["conflicts"] = std::move(c);
}

void ReportBuilder::set_prune(const PruneResult& result, size_t k) {
    nlohmann::json p = result.to_json();
    p["k"] = k;
    report["prune"] = std::move(p);
}

void ReportBuilder::add_scores(const std::vector<ScoreRow>& rows) {
    if (!report.contains("scores")) report["scores"] = nlohmann::json::array();
    for (const auto& row : rows) report["scores"].push_back(row.to_json());
}

void ReportBuilder::set_probe(const ProbeResult& probe) { report["probe"] = probe.to_json(); }

void ReportBuilder::set_excluded(const std::vector<std::string>& ids) {
    report["excluded_dialogues"] = ids;
}

void ReportBuilder::add_note(const std::string& note) { report["notes"].push_back(note); }

std::string ReportBuilder::to_json_text() const { return report.dump(2) + "\n"; }

std::string render_markdown(const nlohmann::json& report) {
    std::string md;
    md += "# dialaudit report\n\n";
    md += "tool version: " + report.value("tool_version", std::string("?")) + "\n\n";

    if (report.contains("stage_log"))
        md += "stages: " + stage_note(report["stage_log"]) + "\n\n";

    if (report.contains("corpus")) {
        const auto& c = report["corpus"];
        md += "## corpus\n\n";
        md += "| dialogues | actions | user events | kb status events | parsed | skipped |\n";
        md += "|---|---|---|---|---|---|\n";
        const auto& s = c["source_stats"];
        md += "| " + std::to_string(c["dialogues"].get<long long>()) + " | " +
              std::to_string(c["actions"].get<long long>()) + " | " +
              std::to_string(c["user_events"].get<long long>()) + " | " +
              std::to_string(c["kb_status_events"].get<long long>()) + " | " +
              std::to_string(s["parsed"].get<long long>()) + " | " +
              std::to_string(s["skipped"].get<long long>()) + " |\n\n";
    }

    if (report.contains("conflicts")) {
        const auto& c = report["conflicts"];
        md += "## conflicts\n\n";
        md += "count: " + std::to_string(c["count"].get<long long>()) +
              ", total mass: " + std::to_string(c["total_mass"].get<long long>()) + "\n\n";
    }

    if (report.contains("prune")) {
        const auto& p = report["prune"];
        md += "## prune\n\n";
        md += "kept: " + std::to_string(p["kept_count"].get<long long>()) +
              ", removed: " + std::to_string(p["removed_count"].get<long long>()) +
              ", rounds: " + std::to_string(p["rounds"].get<long long>()) + "\n\n";
    }

    if (report.contains("scores") && !report["scores"].empty()) {
        md += "## scores\n\n";
        md += "| model | max_history | stage | N(train) | train F1 | train acc | test F1 | test acc |\n";
        md += "|---|---|---|---|---|---|---|---|\n";
        for (const auto& row : report["scores"]) {
            md += "| " + row["model"].get<std::string>();
            md += " | " + std::to_string(row["k"].get<long long>());
            md += " | " + stage_note(row["stage_log"]);
            md += " | " + std::to_string(row["train_dialogues"].get<long long>());
            md += " | " + fixed4(row["train_macro_f1"].get<double>());
            md += " | " + fixed4(row["train_accuracy"].get<double>());
            md += " | " + fixed4(row["test_macro_f1"].get<double>());
            md += " | " + fixed4(row["test_accuracy"].get<double>());
            md += " |\n";
        }
        md += "\n";
    }

    if (report.contains("probe")) {
        const auto& probe = report["probe"];
        md += "## history probe\n\n";
        md += "| model | max_history | train F1 | train acc | test F1 | test acc |\n";
        md += "|---|---|---|---|---|---|\n";
        for (const auto& row : probe["rows"]) {
            md += "| " + row["model"].get<std::string>();
            md += " | " + std::to_string(row["k"].get<long long>());
            md += " | " + fixed4(row["train_macro_f1"].get<double>());
            md += " | " + fixed4(row["train_accuracy"].get<double>());
            md += " | " + fixed4(row["test_macro_f1"].get<double>());
            md += " | " + fixed4(row["test_accuracy"].get<double>());
            md += " |\n";
        }
        md += "\n| model | k pair | train acc delta | test acc delta | train F1 delta | test F1 delta |\n";
        md += "|---|---|---|---|---|---|\n";
        for (const auto& d : probe["deltas"]) {
            md += "| " + d["model"].get<std::string>();
            md += " | " + std::to_string(d["k_from"].get<long long>()) + " vs " +
                  std::to_string(d["k_to"].get<long long>());
            md += " | " + fixed4(d["train_accuracy_delta"].get<double>());
            md += " | " + fixed4(d["test_accuracy_delta"].get<double>());
            md += " | " + fixed4(d["train_f1_delta"].get<double>());
            md += " | " + fixed4(d["test_f1_delta"].get<double>());
            md += " |\n";
        }
        md += "\n";
    }

    if (report.contains("notes") && !report["notes"].empty()) {
        md += "## notes\n\n";
        for (const auto& note : report["notes"]) md += "- " + note.get<std::string>() + "\n";
        md += "\n";
    }
    return md;
}

std::string render_csv(const nlohmann::json& report) {
    std::string csv =
        "section,model,k,stage,train_macro_f1,train_accuracy,test_macro_f1,test_accuracy\n";
    auto emit = [&](const char* section, const nlohmann::json& row) {
        csv += std::string(section) + "," + row["model"].get<std::string>() + "," +
               std::to_string(row["k"].get<long long>()) + "," +
               (row.contains("stage_log") ? stage_note(row["stage_log"]) : "") + "," +
               fixed4(row["train_macro_f1"].get<double>()) + "," +
               fixed4(row["train_accuracy"].get<double>()) + "," +
               fixed4(row["test_macro_f1"].get<double>()) + "," +
               fixed4(row["test_accuracy"].get<double>()) + "\n";
    };
    if (report.contains("scores"))
        for (const auto& row : report["scores"]) emit("scores", row);
    if (report.contains("probe"))
        for (const auto& row : report["probe"]["rows"]) emit("probe", row);
    return csv;
}

}  // namespace dialaudit
