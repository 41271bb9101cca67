#include "dialaudit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "dialaudit/hash.hpp"

namespace dialaudit {

namespace {

constexpr uint64_t kInjectionStream = 0xd1a1a0d17ull;

CanonicalLabel synth_label(size_t index) {
    CanonicalLabel label;
    label.domain = "synth";
    label.act_type = "A" + std::to_string(index);
    return label;
}

Event synth_user(size_t option) {
    return Event::make_user("inform", {{"opt_" + std::to_string(option), kTagSpecific}});
}

size_t deterministic_action(const std::vector<Event>& events, const SynthSpec& spec) {
    HistoryKey key = window(events, events.size(), spec.horizon);
    return fnv1a64(key) % spec.label_vocab;
}

// [0,1) from the top 53 bits; distributions from <random> are not
// implementation-stable, the raw engine output is.
double unit_double(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

void validate(const SynthSpec& spec) {
    if (spec.num_dialogues == 0 || spec.mean_turns == 0 || spec.actions_per_turn == 0)
        throw InputError("synth spec: counts must be positive");
    if (spec.label_vocab == 0 || spec.user_vocab == 0)
        throw InputError("synth spec: vocabularies must be non-empty");
    if (spec.horizon < 1) throw InputError("synth spec: horizon must be >= 1");
    for (const auto& inj : spec.injections) {
        if (inj.alternatives.size() < 2)
            throw InputError("synth spec: injection needs >= 2 alternatives");
        double total = 0;
        for (const auto& [label_index, p] : inj.alternatives) {
            if (label_index >= spec.label_vocab)
                throw InputError("synth spec: injection label index " +
                                 std::to_string(label_index) + " outside vocabulary of " +
                                 std::to_string(spec.label_vocab));
            if (p <= 0) throw InputError("synth spec: injection probabilities must be positive");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw InputError("synth spec: injection probabilities must sum to 1");
    }
}

// One dialogue; `injected` maps realized horizon-keys to injection indices.
// Sampling draws come from a per-dialogue stream that is untouched by the
// user-event stream, so base traffic is identical across passes.
DialogueRecord generate_dialogue(const SynthSpec& spec, size_t index,
                                 const std::map<HistoryKey, size_t>& injected) {
    std::mt19937_64 user_rng(splitmix64(spec.seed ^ (2 * index + 1)));
    std::mt19937_64 inject_rng(splitmix64(spec.seed ^ kInjectionStream ^ (2 * index + 1)));

    DialogueRecord d;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%06zu", index);
    d.id = id;
    d.source = "synth";

    size_t turns = spec.mean_turns;
    size_t jitter = user_rng() % 3;  // 0,1,2 -> -1,0,+1
    if (jitter == 0 && turns > 1) --turns;
    if (jitter == 2) ++turns;

    for (size_t t = 0; t < turns; ++t) {
        d.events.push_back(synth_user(user_rng() % spec.user_vocab));
        for (size_t a = 0; a < spec.actions_per_turn; ++a) {
            size_t label_index;
            auto it = injected.empty()
                          ? injected.end()
                          : injected.find(window(d.events, d.events.size(), spec.horizon));
            if (it != injected.end()) {
                const auto& alternatives = spec.injections[it->second].alternatives;
                double roll = unit_double(inject_rng);
                double cumulative = 0;
                label_index = alternatives.back().first;
                for (const auto& [candidate, p] : alternatives) {
                    cumulative += p;
                    if (roll < cumulative) { label_index = candidate; break; }
                }
            } else {
                label_index = deterministic_action(d.events, spec);
            }
            d.events.push_back(Event::make_action(synth_label(label_index)));
        }
    }
    d.domains.insert("synth");
    return d;
}

}  // namespace

Corpus generate(const SynthSpec& spec) {
    validate(spec);

    std::map<HistoryKey, size_t> injected;
    if (!spec.injections.empty()) {
        // Realize injection keys from base traffic so they are guaranteed to
        // occur: base pass without injections, then pick per-injection the
        // most frequent matching horizon-key.
        std::map<HistoryKey, long long> frequency;
        for (size_t i = 0; i < spec.num_dialogues; ++i) {
            DialogueRecord d = generate_dialogue(spec, i, {});
            for (size_t p = 0; p < d.events.size(); ++p)
                if (d.events[p].kind() == Event::Kind::Action)
                    frequency[window(d.events, p, spec.horizon)] += 1;
        }
        for (size_t j = 0; j < spec.injections.size(); ++j) {
            const std::string& pattern = spec.injections[j].key_pattern;
            const HistoryKey* best = nullptr;
            long long best_count = 0;
            for (const auto& [key, count] : frequency) {
                if (injected.count(key)) continue;
                if (!pattern.empty() && key.find(pattern) == std::string::npos) continue;
                if (count > best_count) { best = &key; best_count = count; }
            }
            if (!best)
                throw InputError("synth spec: injection " + std::to_string(j) +
                                 " matches no realized history key");
            injected.emplace(*best, j);
        }
    }

    Corpus corpus;
    for (size_t i = 0; i < spec.num_dialogues; ++i)
        corpus.dialogues.push_back(generate_dialogue(spec, i, injected));
    corpus.stats.total_in_source = static_cast<long long>(spec.num_dialogues);
    corpus.stats.parsed = static_cast<long long>(spec.num_dialogues);
    refresh_vocab(corpus);
    return corpus;
}

std::pair<long long, long long> expected_train_accuracy(const SynthSpec& spec,
                                                        const Corpus& realized, size_t k) {
    if (k < spec.horizon)
        throw InputError("expected_train_accuracy: k below the dependence horizon");
    std::map<HistoryKey, std::map<std::string, long long>> counts;
    for (const auto& d : realized.dialogues)
        for (size_t p = 0; p < d.events.size(); ++p)
            if (d.events[p].kind() == Event::Kind::Action)
                counts[window(d.events, p, k)][d.events[p].action().key()] += 1;
    long long correct = 0, total = 0;
    for (const auto& [key, labels] : counts) {
        long long max_count = 0;
        for (const auto& [_, count] : labels) {
            total += count;
            max_count = std::max(max_count, count);
        }
        correct += max_count;
    }
    return {correct, total};
}

nlohmann::json SynthSpec::to_json() const {
    nlohmann::json j;
    j["num_dialogues"] = num_dialogues;
    j["mean_turns"] = mean_turns;
    j["label_vocab"] = label_vocab;
    j["user_vocab"] = user_vocab;
    j["actions_per_turn"] = actions_per_turn;
    j["horizon"] = horizon;
    j["seed"] = seed;
    nlohmann::json injections_json = nlohmann::json::array();
    for (const auto& inj : injections) {
        nlohmann::json ij;
        ij["key_pattern"] = inj.key_pattern;
        nlohmann::json alts = nlohmann::json::array();
        for (const auto& [label_index, p] : inj.alternatives)
            alts.push_back({{"label", label_index}, {"p", p}});
        ij["alternatives"] = std::move(alts);
        injections_json.push_back(std::move(ij));
    }
    j["injections"] = std::move(injections_json);
    return j;
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    SynthSpec spec;
    spec.num_dialogues = j.value("num_dialogues", spec.num_dialogues);
    spec.mean_turns = j.value("mean_turns", spec.mean_turns);
    spec.label_vocab = j.value("label_vocab", spec.label_vocab);
    spec.user_vocab = j.value("user_vocab", spec.user_vocab);
    spec.actions_per_turn = j.value("actions_per_turn", spec.actions_per_turn);
    spec.horizon = j.value("horizon", spec.horizon);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("injections")) {
        for (const auto& ij : j["injections"]) {
            InjectionSpec inj;
            inj.key_pattern = ij.value("key_pattern", "");
            for (const auto& alt : ij.at("alternatives"))
                inj.alternatives.emplace_back(alt.at("label").get<size_t>(),
                                              alt.at("p").get<double>());
            spec.injections.push_back(std::move(inj));
        }
    }
    return spec;
}

}  // namespace dialaudit
