#pragma once

// Branch-point detection and recursive pruning to a maximal unambiguous
// sub-corpus: histories after which the corpus contains two or more distinct
// next actions are conflicts; pruning removes whole dialogues until none
// remain, then re-adds whatever fits back.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"

namespace dialaudit {

struct Conflict {
    HistoryKey key;
    // label key -> (label, count); >=2 distinct entries
    std::map<std::string, std::pair<CanonicalLabel, long long>> alternatives;
    // label key -> witnessing dialogue ids
    std::map<std::string, std::set<std::string>> witnesses;

    long long total() const;
    nlohmann::json to_json(size_t max_witnesses = 0) const;  // 0 = all
};

struct RemovedDialogue {
    std::string id;
    Conflict cause;  // the conflict that doomed it in its removal round
};

struct PruneResult {
    Corpus kept;
    std::vector<RemovedDialogue> removed;
    int rounds = 0;

    nlohmann::json to_json() const;
};

// One Conflict per history key with >=2 distinct next actions, sorted by
// descending total count, then ascending key.
std::vector<Conflict> find_conflicts(const Corpus& corpus, size_t k);

// Greedy majority-keep to fixpoint, then a deterministic re-add pass over
// the removed dialogues in ascending id order. The result is conflict-free
// and maximal: no single removed dialogue can be added back.
PruneResult prune(const Corpus& corpus, size_t k);

// True iff the corpus has no conflicts at window k. When true and the corpus
// is non-empty, also fits a memorization model and asserts it scores exact
// accuracy 1.0 on the corpus (InternalError otherwise).
std::pair<bool, std::vector<Conflict>> verify_unambiguous(const Corpus& corpus, size_t k);

}  // namespace dialaudit
