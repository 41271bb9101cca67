#include "dialaudit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dialaudit/hash.hpp"

namespace dialaudit {

namespace {

struct ClassCounts {
    long long tp = 0, fp = 0, fn = 0;
};

struct EvalCounts {
    long long correct = 0, total = 0;
    std::map<std::string, ClassCounts> classes;
};

EvalCounts score_corpus(PredictorKind kind, const HistoryIndex& index, const Corpus& corpus) {
    EvalCounts counts;
    std::vector<Event> history;
    for (const auto& d : corpus.dialogues) {
        history.clear();
        for (const auto& e : d.events) {
            if (e.kind() == Event::Kind::Action) {
                Prediction pred = kind == PredictorKind::Memorize
                                      ? predict_memorize(index, history)
                                      : predict_backoff(index, history);
                std::string truth = e.action().key();
                std::string guess = pred.label.key();
                ++counts.total;
                if (guess == truth) {
                    ++counts.correct;
                    ++counts.classes[truth].tp;
                } else {
                    ++counts.classes[truth].fn;
                    ++counts.classes[guess].fp;
                }
            }
            history.push_back(e);
        }
    }
    return counts;
}

double macro_f1(const EvalCounts& counts) {
    if (counts.classes.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [_, c] : counts.classes) {
        double precision = (c.tp + c.fp) == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fp);
        double recall = (c.tp + c.fn) == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fn);
        double f1 = (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
        sum += f1;
    }
    return sum / double(counts.classes.size());
}

double ratio(long long num, long long den) { return den == 0 ? 0.0 : double(num) / double(den); }

}  // namespace

std::string predictor_name(PredictorKind kind) {
    return kind == PredictorKind::Memorize ? "memorize" : "backoff";
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, const SplitSpec& spec) {
    if (corpus.dialogues.size() < 2)
        throw InputError("split_corpus: need at least 2 dialogues");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw InputError("split_corpus: train_fraction must be in (0,1)");

    std::vector<std::pair<uint64_t, const std::string*>> ranked;
    ranked.reserve(corpus.dialogues.size());
    for (const auto& d : corpus.dialogues)
        ranked.emplace_back(fnv1a64(d.id, splitmix64(spec.seed)), &d.id);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return *a.second < *b.second;
    });

    size_t n = ranked.size();
    size_t train_n = static_cast<size_t>(std::llround(spec.train_fraction * double(n)));
    train_n = std::min(std::max<size_t>(train_n, 1), n - 1);

    std::set<std::string> train_ids;
    for (size_t i = 0; i < train_n; ++i) train_ids.insert(*ranked[i].second);

    Corpus train, test;
    train.stage_log = test.stage_log = corpus.stage_log;
    train.stats = test.stats = corpus.stats;
    for (const auto& d : corpus.dialogues)
        (train_ids.count(d.id) ? train : test).dialogues.push_back(d);
    refresh_vocab(train);
    refresh_vocab(test);
    return {std::move(train), std::move(test)};
}

ScoreRow evaluate(PredictorKind kind, const HistoryIndex& index, const Corpus& train,
                  const Corpus& test) {
    EvalCounts train_counts = score_corpus(kind, index, train);
    EvalCounts test_counts = score_corpus(kind, index, test);

    if (kind == PredictorKind::Memorize) {
        auto [expected_correct, expected_total] = closed_form_train_accuracy(index);
        if (train_counts.correct != expected_correct || train_counts.total != expected_total)
            throw InternalError(
                "memorization train accuracy diverges from closed form: measured " +
                std::to_string(train_counts.correct) + "/" + std::to_string(train_counts.total) +
                " vs " + std::to_string(expected_correct) + "/" + std::to_string(expected_total));
    }

    ScoreRow row;
    row.model = predictor_name(kind);
    row.k = index.k;
    row.stage_log = train.stage_log;
    row.train_correct = train_counts.correct;
    row.train_total = train_counts.total;
    row.test_correct = test_counts.correct;
    row.test_total = test_counts.total;
    row.train_accuracy = ratio(train_counts.correct, train_counts.total);
    row.test_accuracy = ratio(test_counts.correct, test_counts.total);
    row.train_macro_f1 = macro_f1(train_counts);
    row.test_macro_f1 = macro_f1(test_counts);
    // single-label multiclass micro-F1 collapses to accuracy
    row.train_micro_f1 = row.train_accuracy;
    row.test_micro_f1 = row.test_accuracy;
    row.train_dialogues = train.dialogues.size();
    row.test_dialogues = test.dialogues.size();
    return row;
}

ProbeResult history_probe(const Corpus& corpus, const std::vector<size_t>& ks,
                          const SplitSpec& spec) {
    if (ks.empty()) throw InputError("history_probe: ks must be non-empty");
    auto [train, test] = split_corpus(corpus, spec);

    ProbeResult result;
    result.ks = ks;
    for (size_t k : ks) {
        HistoryIndex index = fit(train, k);
        result.rows.push_back(evaluate(PredictorKind::Memorize, index, train, test));
        result.rows.push_back(evaluate(PredictorKind::Backoff, index, train, test));
    }
    auto row_for = [&](PredictorKind kind, size_t idx) -> const ScoreRow& {
        return result.rows[idx * 2 + (kind == PredictorKind::Memorize ? 0 : 1)];
    };
    for (size_t i = 1; i < ks.size(); ++i) {
        for (PredictorKind kind : {PredictorKind::Memorize, PredictorKind::Backoff}) {
            const ScoreRow& a = row_for(kind, 0);
            const ScoreRow& b = row_for(kind, i);
            ProbeDelta delta;
            delta.model = predictor_name(kind);
            delta.k_from = ks[0];
            delta.k_to = ks[i];
            delta.train_accuracy_delta = std::abs(a.train_accuracy - b.train_accuracy);
            delta.test_accuracy_delta = std::abs(a.test_accuracy - b.test_accuracy);
            delta.train_f1_delta = std::abs(a.train_macro_f1 - b.train_macro_f1);
            delta.test_f1_delta = std::abs(a.test_macro_f1 - b.test_macro_f1);
            result.deltas.push_back(std::move(delta));
        }
    }
    return result;
}

nlohmann::json SplitSpec::to_json() const {
    nlohmann::json j;
    j["train_fraction"] = train_fraction;
    j["seed"] = seed;
    return j;
}

SplitSpec SplitSpec::from_json(const nlohmann::json& j) {
    SplitSpec spec;
    spec.train_fraction = j.value("train_fraction", 0.8);
    spec.seed = j.value("seed", uint64_t{0});
    return spec;
}

nlohmann::json ScoreRow::to_json() const {
    nlohmann::json j;
    j["model"] = model;
    j["k"] = k;
    j["stage_log"] = stage_log;
    j["train_accuracy"] = train_accuracy;
    j["test_accuracy"] = test_accuracy;
    j["train_macro_f1"] = train_macro_f1;
    j["test_macro_f1"] = test_macro_f1;
    j["train_micro_f1"] = train_micro_f1;
    j["test_micro_f1"] = test_micro_f1;
    j["train_correct"] = train_correct;
    j["train_total"] = train_total;
    j["test_correct"] = test_correct;
    j["test_total"] = test_total;
    j["train_dialogues"] = train_dialogues;
    j["test_dialogues"] = test_dialogues;
    return j;
}

nlohmann::json ProbeDelta::to_json() const {
    nlohmann::json j;
    j["model"] = model;
    j["k_from"] = k_from;
    j["k_to"] = k_to;
    j["train_accuracy_delta"] = train_accuracy_delta;
    j["test_accuracy_delta"] = test_accuracy_delta;
    j["train_f1_delta"] = train_f1_delta;
    j["test_f1_delta"] = test_f1_delta;
    return j;
}

nlohmann::json ProbeResult::to_json() const {
    nlohmann::json j;
    j["ks"] = ks;
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) rows_json.push_back(r.to_json());
    j["rows"] = std::move(rows_json);
    nlohmann::json deltas_json = nlohmann::json::array();
    for (const auto& d : deltas) deltas_json.push_back(d.to_json());
    j["deltas"] = std::move(deltas_json);
    return j;
}

}  // namespace dialaudit
