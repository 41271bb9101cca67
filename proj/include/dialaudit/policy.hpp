#pragma once

// Windowed memorization policy and its suffix-backoff generalization.
// A fitted HistoryIndex is frozen; reads are safe from any thread.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"

namespace dialaudit {

struct Prediction {
    CanonicalLabel label;
    long long support = 0;            // observation count behind the choice
    size_t matched_suffix_length = 0;  // 0 iff fallback
    bool fallback = false;
};

// Trie-flattened map from history windows to next-action count multisets.
// Keys are canonical window serializations; all maps are ordered so fitting
// and prediction are bit-reproducible.
struct HistoryIndex {
    size_t k = 0;
    long long indexed_actions = 0;
    std::map<std::string, CanonicalLabel> labels;                  // label key -> label
    std::map<HistoryKey, std::map<std::string, long long>> table;  // window -> label key -> count
    std::map<std::string, long long> global_counts;

    nlohmann::json to_json() const;
    static HistoryIndex from_json(const nlohmann::json& j);
};

// Indexes every action position of every dialogue under its k-window.
// Throws InputError on an empty corpus or k < 1.
HistoryIndex fit(const Corpus& corpus, size_t k);

// Exact lookup of the full min(k, |history|)-window; global majority with
// fallback=true when the window is unseen. Ties break lexicographically on
// the label's canonical serialization.
Prediction predict_memorize(const HistoryIndex& index, const std::vector<Event>& history);

// Longest seen suffix: tries suffix lengths min(k, |history|) down to 1,
// then the global majority.
Prediction predict_backoff(const HistoryIndex& index, const std::vector<Event>& history);

// Closed form for memorization training accuracy: (sum over keys of the
// majority count, total indexed actions).
std::pair<long long, long long> closed_form_train_accuracy(const HistoryIndex& index);

}  // namespace dialaudit
