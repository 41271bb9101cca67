#include "dialaudit/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dialaudit/ambiguity.hpp"
#include "dialaudit/canonicalize.hpp"
#include "dialaudit/json_io.hpp"
#include "dialaudit/metrics.hpp"
#include "dialaudit/multiwoz.hpp"
#include "dialaudit/policy.hpp"
#include "dialaudit/report.hpp"
#include "dialaudit/synthgen.hpp"
#include "dialaudit/taskmaster.hpp"
#include "dialaudit/version.hpp"

namespace dialaudit::cli {

namespace {

constexpr const char* kConfigEnvVar = "DIALAUDIT_CONFIG";

struct Config {
    SchemaMap schema = SchemaMap::multiwoz_default();
    StageConfig stages = StageConfig::defaults();
    SplitSpec split;
    std::string taskmaster_rules;  // empty = built-in defaults
    size_t top_conflicts = 20;

    json echo() const {
        json j;
        j["schema"] = schema.to_json();
        j["stages"] = stages.to_json();
        j["split"] = split.to_json();
        j["taskmaster_rules"] = taskmaster_rules;
        j["top_conflicts"] = top_conflicts;
        return j;
    }

    static Config load(const std::string& path) {
        Config cfg;
        if (path.empty()) return cfg;
        json j = load_json_file(path);
        if (j.contains("schema")) cfg.schema = SchemaMap::from_json(j["schema"]);
        if (j.contains("stages")) cfg.stages = StageConfig::from_json(j["stages"]);
        if (j.contains("split")) cfg.split = SplitSpec::from_json(j["split"]);
        cfg.taskmaster_rules = j.value("taskmaster_rules", "");
        cfg.top_conflicts = j.value("top_conflicts", size_t{20});
        return cfg;
    }
};

std::vector<size_t> parse_ks(const std::string& text) {
    std::vector<size_t> ks;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            long value = std::stol(token);
            if (value < 1) throw std::invalid_argument("k");
            ks.push_back(static_cast<size_t>(value));
        } catch (const std::exception&) {
            throw InputError("bad --ks entry '" + token + "': expected positive integers");
        }
    }
    if (ks.empty()) throw InputError("--ks needs at least one window size");
    return ks;
}

StageConfig stages_from_flag(const std::string& flag, const StageConfig& base) {
    StageConfig cfg = base;
    cfg.status_slots = cfg.merge_labels = cfg.drop_reqmore = false;
    std::stringstream in(flag);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token == kStageStatusSlots) cfg.status_slots = true;
        else if (token == kStageMergeLabels) cfg.merge_labels = true;
        else if (token == kStageDropReqmore) cfg.drop_reqmore = true;
        else if (!token.empty())
            throw InputError("unknown stage '" + token + "' (expected " +
                             std::string(kStageStatusSlots) + ", " + kStageMergeLabels + " or " +
                             kStageDropReqmore + ")");
    }
    return cfg;
}

DomainRegexRules rules_for(const Config& cfg, const std::string& flag_path) {
    if (!flag_path.empty()) return DomainRegexRules::load(flag_path);
    if (!cfg.taskmaster_rules.empty()) return DomainRegexRules::load(cfg.taskmaster_rules);
    return DomainRegexRules::defaults();
}

// Dialogues flagged with an uninferable booking domain are excluded from
// audits; the report lists them.
Corpus filter_flagged(const Corpus& corpus, std::vector<std::string>* excluded) {
    Corpus out;
    out.stage_log = corpus.stage_log;
    out.stats = corpus.stats;
    for (const auto& d : corpus.dialogues) {
        if (d.booking_domain_unknown) {
            if (excluded) excluded->push_back(d.id);
        } else {
            out.dialogues.push_back(d);
        }
    }
    refresh_vocab(out);
    return out;
}

void add_standard_notes(ReportBuilder& builder, const Corpus& corpus) {
    builder.add_note("slot names are domain-qualified (e.g. hotel_area)");
    bool has_status = false, taskmaster = false;
    for (const auto& d : corpus.dialogues) {
        if (d.source == "taskmaster") taskmaster = true;
        for (const auto& e : d.events)
            if (e.kind() == Event::Kind::KbStatus) { has_status = true; break; }
    }
    if (has_status)
        builder.add_note(
            "status values are derived from KB match counts, not from dataset annotations; "
            "they may diverge from the collectors' lookups");
    if (taskmaster)
        builder.add_note(
            "taskmaster scores are proxy metrics over annotation-signature labels, "
            "not plain-text retrieval scores");
}

struct Options {
    std::string config_path;
    std::string in_path, out_path;
    std::string dataset_kind;
    std::string data_dir;
    std::string rules_path;
    std::string stages_flag;
    std::string result_path;
    std::string spec_path;
    std::string index_path;
    std::string format = "json";
    std::string ks_flag = "10,2";
    size_t k = 10;
    uint64_t seed = 0;
    bool seed_given = false;
    bool end_of_turn = false;
};

int cmd_ingest(const Config& cfg, const Options& opt) {
    Corpus corpus;
    long long skipped = 0;
    if (opt.dataset_kind == "multiwoz") {
        MultiwozLoadResult result = load_multiwoz(opt.in_path, cfg.schema);
        corpus = std::move(result.corpus);
        skipped = result.skipped;
    } else if (opt.dataset_kind == "taskmaster") {
        TaskmasterLoadResult result = load_taskmaster(opt.in_path, rules_for(cfg, opt.rules_path));
        corpus = std::move(result.corpus);
        skipped = result.skipped;
    } else {
        throw InputError("unknown dataset '" + opt.dataset_kind +
                         "' (expected multiwoz or taskmaster)");
    }
    save_corpus_file(corpus, opt.out_path);
    std::cout << "parsed " << corpus.dialogues.size() << " dialogues, skipped " << skipped
              << ", wrote " << opt.out_path << "\n";
    return 0;
}

int cmd_canonicalize(const Config& cfg, const Options& opt) {
    Corpus corpus = load_corpus_file(opt.in_path);
    StageConfig stages = opt.stages_flag.empty() ? cfg.stages
                                                 : stages_from_flag(opt.stages_flag, cfg.stages);
    KbTables kb;
    const KbTables* kb_ptr = nullptr;
    bool needs_kb = stages.status_slots &&
                    std::any_of(corpus.dialogues.begin(), corpus.dialogues.end(),
                                [](const auto& d) { return !d.turn_beliefs.empty(); });
    if (needs_kb) {
        if (opt.data_dir.empty())
            throw InputError("status_slots needs the dataset KB files; pass --data-dir");
        kb = load_kb_tables(opt.data_dir, cfg.schema);
        kb_ptr = &kb;
    }
    Corpus out = apply_stages(corpus, stages, kb_ptr);
    save_corpus_file(out, opt.out_path);
    std::cout << "applied stages [";
    for (size_t i = 0; i < out.stage_log.size(); ++i)
        std::cout << (i ? ", " : "") << out.stage_log[i];
    std::cout << "], wrote " << opt.out_path << "\n";
    return 0;
}

int cmd_audit(const Config& cfg, const Options& opt) {
    std::vector<std::string> excluded;
    Corpus corpus = filter_flagged(load_corpus_file(opt.in_path), &excluded);
    if (opt.end_of_turn) corpus = append_end_of_turn_markers(corpus);

    ReportBuilder builder;
    builder.set_config(cfg.echo());
    builder.add_input("corpus", opt.in_path);
    builder.set_corpus(corpus);
    builder.set_excluded(excluded);
    builder.set_conflicts(find_conflicts(corpus, opt.k), cfg.top_conflicts);

    auto [train, test] = split_corpus(corpus, cfg.split);
    HistoryIndex index = fit(train, opt.k);
    builder.add_scores({evaluate(PredictorKind::Memorize, index, train, test),
                        evaluate(PredictorKind::Backoff, index, train, test)});
    add_standard_notes(builder, corpus);

    if (!opt.index_path.empty())
        write_file_atomic(opt.index_path, index.to_json().dump(2) + "\n");
    write_file_atomic(opt.out_path, builder.to_json_text());
    std::cout << "wrote " << opt.out_path << "\n";
    return 0;
}

int cmd_prune(const Config&, const Options& opt) {
    std::vector<std::string> excluded;
    Corpus corpus = filter_flagged(load_corpus_file(opt.in_path), &excluded);
    PruneResult result = prune(corpus, opt.k);
    auto [ok, conflicts] = verify_unambiguous(result.kept, opt.k);
    if (!ok) throw InternalError("prune left " + std::to_string(conflicts.size()) + " conflicts");
    save_corpus_file(result.kept, opt.out_path);
    if (!opt.result_path.empty())
        write_file_atomic(opt.result_path, result.to_json().dump(2) + "\n");
    std::cout << "kept " << result.kept.dialogues.size() << " of "
              << corpus.dialogues.size() << " dialogues in " << result.rounds
              << " rounds, wrote " << opt.out_path << "\n";
    return 0;
}

int cmd_probe(const Config& cfg, const Options& opt) {
    std::vector<std::string> excluded;
    Corpus corpus = filter_flagged(load_corpus_file(opt.in_path), &excluded);
    if (opt.end_of_turn) corpus = append_end_of_turn_markers(corpus);
    SplitSpec split = cfg.split;
    if (opt.seed_given) split.seed = opt.seed;

    ReportBuilder builder;
    builder.set_config(cfg.echo());
    builder.add_input("corpus", opt.in_path);
    builder.set_corpus(corpus);
    builder.set_excluded(excluded);
    builder.set_probe(history_probe(corpus, parse_ks(opt.ks_flag), split));
    add_standard_notes(builder, corpus);

    write_file_atomic(opt.out_path, builder.to_json_text());
    std::cout << "wrote " << opt.out_path << "\n";
    return 0;
}

int cmd_synth(const Config&, const Options& opt) {
    SynthSpec spec;
    if (!opt.spec_path.empty()) spec = SynthSpec::from_json(load_json_file(opt.spec_path));
    if (opt.seed_given) spec.seed = opt.seed;
    Corpus corpus = generate(spec);
    save_corpus_file(corpus, opt.out_path);
    std::cout << "generated " << corpus.dialogues.size() << " dialogues, wrote " << opt.out_path
              << "\n";
    return 0;
}

int cmd_report(const Config&, const Options& opt) {
    json report = load_json_file(opt.in_path);
    std::string rendered;
    if (opt.format == "json") rendered = report.dump(2) + "\n";
    else if (opt.format == "md") rendered = render_markdown(report);
    else if (opt.format == "csv") rendered = render_csv(report);
    else throw InputError("unknown --format '" + opt.format + "' (expected json, csv or md)");
    if (opt.out_path.empty()) {
        std::cout << rendered;
    } else {
        write_file_atomic(opt.out_path, rendered);
        std::cout << "wrote " << opt.out_path << "\n";
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"task-oriented dialogue corpus auditor"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_path, "config file (or env " + std::string(kConfigEnvVar) + ")");

    auto add_common = [&](CLI::App* sub, bool needs_out) {
        sub->add_option("--in", opt.in_path, "input path")->required();
        auto* out = sub->add_option("--out", opt.out_path, "output path");
        if (needs_out) out->required();
    };

    CLI::App* ingest = app.add_subcommand("ingest", "load a dataset into corpus JSON");
    ingest->add_option("dataset", opt.dataset_kind, "multiwoz or taskmaster")->required();
    add_common(ingest, true);
    ingest->add_option("--rules", opt.rules_path, "taskmaster domain rules file");

    CLI::App* canonicalize = app.add_subcommand("canonicalize", "apply simplification stages");
    add_common(canonicalize, true);
    canonicalize->add_option("--stages", opt.stages_flag, "comma list of stages to apply");
    canonicalize->add_option("--data-dir", opt.data_dir, "dataset directory with KB files");

    CLI::App* audit = app.add_subcommand("audit", "conflict inventory and policy scores");
    add_common(audit, true);
    audit->add_option("--k", opt.k, "history window size");
    audit->add_option("--save-index", opt.index_path, "also write the fitted history index");
    audit->add_flag("--end-of-turn", opt.end_of_turn, "append synthetic end-of-turn actions");

    CLI::App* prune_cmd = app.add_subcommand("prune", "remove ambiguous dialogues");
    add_common(prune_cmd, true);
    prune_cmd->add_option("--k", opt.k, "history window size");
    prune_cmd->add_option("--result", opt.result_path, "write the prune log JSON here");

    CLI::App* probe = app.add_subcommand("probe", "history-independence probe");
    add_common(probe, true);
    probe->add_option("--ks", opt.ks_flag, "comma list of window sizes (default 10,2)");
    probe->add_option("--seed", opt.seed, "split seed override")
        ->each([&](const std::string&) { opt.seed_given = true; });
    probe->add_flag("--end-of-turn", opt.end_of_turn, "append synthetic end-of-turn actions");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--spec", opt.spec_path, "SynthSpec JSON file");
    synth->add_option("--out", opt.out_path, "output corpus path")->required();
    synth->add_option("--seed", opt.seed, "seed override")
        ->each([&](const std::string&) { opt.seed_given = true; });

    CLI::App* report = app.add_subcommand("report", "render a report JSON");
    report->add_option("--in", opt.in_path, "report JSON path")->required();
    report->add_option("--out", opt.out_path, "output path (default stdout)");
    report->add_option("--format", opt.format, "json, csv or md");

    std::vector<const char*> argv;
    static const char* prog = "dialaudit";
    argv.push_back(prog);
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        std::string config_path = opt.config_path;
        if (config_path.empty()) {
            const char* env = std::getenv(kConfigEnvVar);
            if (env) config_path = env;
        }
        Config cfg = Config::load(config_path);

        if (ingest->parsed()) return cmd_ingest(cfg, opt);
        if (canonicalize->parsed()) return cmd_canonicalize(cfg, opt);
        if (audit->parsed()) return cmd_audit(cfg, opt);
        if (prune_cmd->parsed()) return cmd_prune(cfg, opt);
        if (probe->parsed()) return cmd_probe(cfg, opt);
        if (synth->parsed()) return cmd_synth(cfg, opt);
        if (report->parsed()) return cmd_report(cfg, opt);
        throw InputError("no subcommand given");
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: check the paths and config; 'dialaudit --help' lists the expected "
                     "inputs, README.md describes the file layouts\n";
        return 1;
    } catch (const InternalError& e) {
        std::cerr << "internal invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace dialaudit::cli
