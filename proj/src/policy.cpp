#include "dialaudit/policy.hpp"

#include <algorithm>

#include "dialaudit/version.hpp"

namespace dialaudit {

namespace {

// First maximum in ascending key order = lexicographically smallest tie-break.
std::pair<std::string, long long> majority(const std::map<std::string, long long>& counts) {
    std::pair<std::string, long long> best{"", 0};
    for (const auto& [key, count] : counts)
        if (count > best.second) best = {key, count};
    return best;
}

}  // namespace

HistoryIndex fit(const Corpus& corpus, size_t k) {
    if (k < 1) throw InputError("fit: window size k must be >= 1");
    if (corpus.dialogues.empty()) throw InputError("fit: empty corpus");
    HistoryIndex index;
    index.k = k;
    for (const auto& d : corpus.dialogues) {
        for (size_t p = 0; p < d.events.size(); ++p) {
            if (d.events[p].kind() != Event::Kind::Action) continue;
            const CanonicalLabel& label = d.events[p].action();
            std::string label_key = label.key();
            index.table[window(d.events, p, k)][label_key] += 1;
            index.global_counts[label_key] += 1;
            index.labels.emplace(label_key, label);
            index.indexed_actions += 1;
        }
    }
    return index;
}

Prediction predict_memorize(const HistoryIndex& index, const std::vector<Event>& history) {
    if (!history.empty()) {
        auto it = index.table.find(window(history, history.size(), index.k));
        if (it != index.table.end()) {
            auto [label_key, count] = majority(it->second);
            return Prediction{index.labels.at(label_key), count,
                              std::min(index.k, history.size()), false};
        }
    }
    auto [label_key, count] = majority(index.global_counts);
    if (label_key.empty()) throw InternalError("predict on an unfitted index");
    return Prediction{index.labels.at(label_key), count, 0, true};
}

Prediction predict_backoff(const HistoryIndex& index, const std::vector<Event>& history) {
    size_t longest = std::min(index.k, history.size());
    for (size_t len = longest; len >= 1; --len) {
        auto it = index.table.find(window(history, history.size(), len));
        if (it != index.table.end()) {
            auto [label_key, count] = majority(it->second);
            return Prediction{index.labels.at(label_key), count, len, false};
        }
    }
    auto [label_key, count] = majority(index.global_counts);
    if (label_key.empty()) throw InternalError("predict on an unfitted index");
    return Prediction{index.labels.at(label_key), count, 0, true};
}

std::pair<long long, long long> closed_form_train_accuracy(const HistoryIndex& index) {
    long long correct = 0;
    long long total = 0;
    for (const auto& [key, counts] : index.table) {
        correct += majority(counts).second;
        for (const auto& [_, count] : counts) total += count;
    }
    return {correct, total};
}

nlohmann::json HistoryIndex::to_json() const {
    nlohmann::json j;
    j["format_version"] = kIndexFormatVersion;
    j["k"] = k;
    j["indexed_actions"] = indexed_actions;
    nlohmann::json labels_json = nlohmann::json::object();
    for (const auto& [key, label] : labels) {
        nlohmann::json lj;
        lj["domain"] = label.domain;
        lj["act_type"] = label.act_type;
        nlohmann::json slots = nlohmann::json::object();
        for (const auto& [name, tag] : label.slots) slots[name] = tag;
        lj["slots"] = std::move(slots);
        labels_json[key] = std::move(lj);
    }
    j["labels"] = std::move(labels_json);
    j["global_counts"] = global_counts;
    j["table"] = table;
    return j;
}

HistoryIndex HistoryIndex::from_json(const nlohmann::json& j) {
    int version = j.value("format_version", 0);
    if (version != kIndexFormatVersion)
        throw InputError("unsupported index format_version " + std::to_string(version));
    HistoryIndex index;
    index.k = j.at("k").get<size_t>();
    index.indexed_actions = j.at("indexed_actions").get<long long>();
    for (auto it = j.at("labels").begin(); it != j.at("labels").end(); ++it) {
        CanonicalLabel label;
        label.domain = it.value().at("domain").get<std::string>();
        label.act_type = it.value().at("act_type").get<std::string>();
        for (auto s = it.value().at("slots").begin(); s != it.value().at("slots").end(); ++s)
            label.slots.emplace_back(s.key(), s.value().get<std::string>());
        index.labels.emplace(it.key(), std::move(label));
    }
    index.global_counts = j.at("global_counts").get<std::map<std::string, long long>>();
    index.table = j.at("table").get<std::map<HistoryKey, std::map<std::string, long long>>>();
    return index;
}

}  // namespace dialaudit
