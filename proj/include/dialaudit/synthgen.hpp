#pragma once

// Synthetic corpora with a controlled history-dependence horizon and
// controlled ambiguity injections, plus the closed-form accuracy oracle.
// Generation is single-threaded and a pure function of the spec.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"

namespace dialaudit {

struct InjectionSpec {
    // Substring selecting a realized horizon-window key; empty matches any.
    // Among matches the most frequent key is chosen (ties: smallest key).
    std::string key_pattern;
    // (label index, probability); probabilities must sum to 1.
    std::vector<std::pair<size_t, double>> alternatives;
};

struct SynthSpec {
    size_t num_dialogues = 100;
    size_t mean_turns = 6;       // per-dialogue turn count jitters by +/-1
    size_t label_vocab = 8;      // action labels Synth-A0 .. Synth-A<n-1>
    size_t user_vocab = 3;       // user slot options opt_0 .. opt_<n-1>
    size_t actions_per_turn = 1;
    size_t horizon = 1;          // next action determined by the last h events
    std::vector<InjectionSpec> injections;
    uint64_t seed = 1;

    nlohmann::json to_json() const;
    static SynthSpec from_json(const nlohmann::json& j);
};

// Every action is a deterministic function of the last `horizon` events,
// except at injected keys where alternatives are sampled per their
// probabilities. Throws InputError on infeasible specs.
Corpus generate(const SynthSpec& spec);

// Exact rational (correct, total): sum over realized k-window keys of the
// majority count, over all action positions. Counted directly from the
// realized corpus, independent of any fitted index. Requires k >= horizon.
std::pair<long long, long long> expected_train_accuracy(const SynthSpec& spec,
                                                        const Corpus& realized, size_t k);

}  // namespace dialaudit
