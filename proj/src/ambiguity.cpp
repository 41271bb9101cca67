#include "dialaudit/ambiguity.hpp"

#include <algorithm>

#include "dialaudit/policy.hpp"
#include "dialaudit/version.hpp"

namespace dialaudit {

namespace {

struct KeyStats {
    std::map<std::string, std::pair<CanonicalLabel, long long>> alternatives;
    std::map<std::string, std::set<std::string>> witnesses;
};

std::map<HistoryKey, KeyStats> collect(const std::vector<const DialogueRecord*>& dialogues, size_t k) {
    std::map<HistoryKey, KeyStats> acc;
    for (const DialogueRecord* d : dialogues) {
        for (size_t p = 0; p < d->events.size(); ++p) {
            if (d->events[p].kind() != Event::Kind::Action) continue;
            const CanonicalLabel& label = d->events[p].action();
            std::string label_key = label.key();
            KeyStats& stats = acc[window(d->events, p, k)];
            auto [it, inserted] = stats.alternatives.emplace(label_key, std::make_pair(label, 1ll));
            if (!inserted) it->second.second += 1;
            stats.witnesses[label_key].insert(d->id);
        }
    }
    return acc;
}

std::vector<Conflict> conflicts_from(const std::map<HistoryKey, KeyStats>& acc) {
    std::vector<Conflict> conflicts;
    for (const auto& [key, stats] : acc) {
        if (stats.alternatives.size() < 2) continue;
        conflicts.push_back(Conflict{key, stats.alternatives, stats.witnesses});
    }
    std::sort(conflicts.begin(), conflicts.end(), [](const Conflict& a, const Conflict& b) {
        long long ta = a.total(), tb = b.total();
        if (ta != tb) return ta > tb;
        return a.key < b.key;
    });
    return conflicts;
}

std::vector<const DialogueRecord*> pointers(const Corpus& corpus, const std::set<std::string>& kept_ids) {
    std::vector<const DialogueRecord*> out;
    for (const auto& d : corpus.dialogues)
        if (kept_ids.count(d.id)) out.push_back(&d);
    return out;
}

// Majority label key of a conflict: highest count, ties to the
// lexicographically smallest label serialization.
std::string majority_label(const Conflict& c) {
    std::string best;
    long long best_count = 0;
    for (const auto& [label_key, entry] : c.alternatives)
        if (entry.second > best_count) { best = label_key; best_count = entry.second; }
    return best;
}

// The (window key, label key) pairs a dialogue contributes at window k.
std::vector<std::pair<HistoryKey, std::string>> dialogue_pairs(const DialogueRecord& d, size_t k) {
    std::vector<std::pair<HistoryKey, std::string>> pairs;
    for (size_t p = 0; p < d.events.size(); ++p)
        if (d.events[p].kind() == Event::Kind::Action)
            pairs.emplace_back(window(d.events, p, k), d.events[p].action().key());
    return pairs;
}

}  // namespace

long long Conflict::total() const {
    long long t = 0;
    for (const auto& [_, entry] : alternatives) t += entry.second;
    return t;
}

nlohmann::json Conflict::to_json(size_t max_witnesses) const {
    nlohmann::json j;
    j["key"] = key;
    j["total"] = total();
    nlohmann::json alts = nlohmann::json::object();
    for (const auto& [label_key, entry] : alternatives) alts[label_key] = entry.second;
    j["alternatives"] = std::move(alts);
    nlohmann::json wit = nlohmann::json::object();
    for (const auto& [label_key, ids] : witnesses) {
        nlohmann::json arr = nlohmann::json::array();
        size_t n = 0;
        for (const auto& id : ids) {
            if (max_witnesses > 0 && n >= max_witnesses) break;
            arr.push_back(id);
            ++n;
        }
        wit[label_key] = std::move(arr);
        if (max_witnesses > 0 && ids.size() > max_witnesses)
            j["witnesses_truncated"] = true;
    }
    j["witnesses"] = std::move(wit);
    return j;
}

std::vector<Conflict> find_conflicts(const Corpus& corpus, size_t k) {
    std::set<std::string> all_ids;
    for (const auto& d : corpus.dialogues) all_ids.insert(d.id);
    return conflicts_from(collect(pointers(corpus, all_ids), k));
}

PruneResult prune(const Corpus& corpus, size_t k) {
    std::set<std::string> kept_ids;
    for (const auto& d : corpus.dialogues) kept_ids.insert(d.id);

    std::map<std::string, Conflict> removal_cause;  // id -> dooming conflict
    int rounds = 0;
    while (true) {
        ++rounds;
        auto conflicts = conflicts_from(collect(pointers(corpus, kept_ids), k));
        if (conflicts.empty()) break;
        std::set<std::string> to_remove;
        for (const auto& c : conflicts) {
            std::string keep = majority_label(c);
            for (const auto& [label_key, ids] : c.witnesses) {
                if (label_key == keep) continue;
                for (const auto& id : ids) {
                    if (to_remove.insert(id).second) removal_cause.emplace(id, c);
                }
            }
        }
        for (const auto& id : to_remove) kept_ids.erase(id);
        if (to_remove.empty())
            throw InternalError("prune: conflicts present but nothing removable");
    }

    // Re-add pass: each removed dialogue in ascending id order, kept if no
    // conflict reappears. Adding dialogues never removes conflicts, so one
    // pass gives maximality.
    std::map<std::string, const DialogueRecord*> by_id;
    for (const auto& d : corpus.dialogues) by_id.emplace(d.id, &d);

    std::map<HistoryKey, std::string> kept_index;  // window -> the single label key
    for (const DialogueRecord* d : pointers(corpus, kept_ids))
        for (auto& [key, label_key] : dialogue_pairs(*d, k)) kept_index[key] = label_key;

    std::vector<std::string> removed_ids;
    for (const auto& [id, _] : removal_cause)
        if (!kept_ids.count(id)) removed_ids.push_back(id);  // map order = ascending id

    for (const auto& id : removed_ids) {
        auto pairs = dialogue_pairs(*by_id.at(id), k);
        bool clean = true;
        std::map<HistoryKey, std::string> own;
        for (const auto& [key, label_key] : pairs) {
            auto kept_it = kept_index.find(key);
            if (kept_it != kept_index.end() && kept_it->second != label_key) { clean = false; break; }
            auto [own_it, inserted] = own.emplace(key, label_key);
            if (!inserted && own_it->second != label_key) { clean = false; break; }
        }
        if (clean) {
            kept_ids.insert(id);
            removal_cause.erase(id);
            for (const auto& [key, label_key] : pairs) kept_index[key] = label_key;
        }
    }

    PruneResult result;
    result.rounds = rounds;
    result.kept.stage_log = corpus.stage_log;
    result.kept.stats = corpus.stats;
    for (const auto& d : corpus.dialogues) {
        if (kept_ids.count(d.id)) {
            result.kept.dialogues.push_back(d);
        } else {
            result.removed.push_back(RemovedDialogue{d.id, removal_cause.at(d.id)});
        }
    }
    refresh_vocab(result.kept);
    return result;
}

std::pair<bool, std::vector<Conflict>> verify_unambiguous(const Corpus& corpus, size_t k) {
    auto conflicts = find_conflicts(corpus, k);
    if (!conflicts.empty()) return {false, std::move(conflicts)};
    if (!corpus.dialogues.empty()) {
        // Conflict-freeness must coincide with a perfect memorization fit.
        HistoryIndex index = fit(corpus, k);
        long long correct = 0, total = 0;
        std::vector<Event> history;
        for (const auto& d : corpus.dialogues) {
            history.clear();
            for (const auto& e : d.events) {
                if (e.kind() == Event::Kind::Action) {
                    ++total;
                    if (predict_memorize(index, history).label == e.action()) ++correct;
                }
                history.push_back(e);
            }
        }
        if (correct != total)
            throw InternalError("verify_unambiguous: conflict-free corpus but memorization accuracy " +
                                std::to_string(correct) + "/" + std::to_string(total));
    }
    return {true, {}};
}

nlohmann::json PruneResult::to_json() const {
    nlohmann::json j;
    j["format_version"] = kPruneFormatVersion;
    j["rounds"] = rounds;
    nlohmann::json kept_ids = nlohmann::json::array();
    for (const auto& d : kept.dialogues) kept_ids.push_back(d.id);
    j["kept_ids"] = std::move(kept_ids);
    j["kept_count"] = kept.dialogues.size();
    nlohmann::json removed_json = nlohmann::json::array();
    for (const auto& r : removed) {
        nlohmann::json rj;
        rj["id"] = r.id;
        rj["conflict"] = r.cause.to_json(5);
        removed_json.push_back(std::move(rj));
    }
    j["removed"] = std::move(removed_json);
    j["removed_count"] = removed.size();
    return j;
}

}  // namespace dialaudit
