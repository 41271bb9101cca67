#pragma once

// Train/test splitting, next-action scoring (accuracy, macro/micro F1), and
// the history-independence probe.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"
#include "dialaudit/policy.hpp"

namespace dialaudit {

struct SplitSpec {
    double train_fraction = 0.8;
    uint64_t seed = 0;

    nlohmann::json to_json() const;
    static SplitSpec from_json(const nlohmann::json& j);
};

// Hash-rank bucketing: dialogues ordered by fnv1a64(seed, id), the first
// round(fraction * n) become train. No RNG state, stable across machines,
// and the train size is within one dialogue of the fraction.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, const SplitSpec& spec);

enum class PredictorKind { Memorize, Backoff };

std::string predictor_name(PredictorKind kind);

struct ScoreRow {
    std::string model;
    size_t k = 0;
    std::vector<std::string> stage_log;
    double train_accuracy = 0, test_accuracy = 0;
    double train_macro_f1 = 0, test_macro_f1 = 0;
    double train_micro_f1 = 0, test_micro_f1 = 0;
    long long train_correct = 0, train_total = 0;
    long long test_correct = 0, test_total = 0;
    size_t train_dialogues = 0, test_dialogues = 0;

    nlohmann::json to_json() const;
};

// Teacher-forced scoring: every action position is predicted from the gold
// preceding events (earlier same-turn actions included). Only action events
// are targets. For the memorization predictor the measured train counts are
// cross-checked against the closed form, so the index must have been fitted
// on `train`.
ScoreRow evaluate(PredictorKind kind, const HistoryIndex& index, const Corpus& train,
                  const Corpus& test);

struct ProbeDelta {
    std::string model;
    size_t k_from = 0, k_to = 0;
    double train_accuracy_delta = 0, test_accuracy_delta = 0;
    double train_f1_delta = 0, test_f1_delta = 0;

    nlohmann::json to_json() const;
};

struct ProbeResult {
    std::vector<size_t> ks;
    std::vector<ScoreRow> rows;      // one per (k, predictor)
    std::vector<ProbeDelta> deltas;  // ks[0] vs each later k, per predictor

    nlohmann::json to_json() const;
};

// Fits one index per k on the train half and scores both predictors on
// train and test.
ProbeResult history_probe(const Corpus& corpus, const std::vector<size_t>& ks,
                          const SplitSpec& spec);

}  // namespace dialaudit
