#include <doctest.h>

#include "dialaudit/ambiguity.hpp"
#include "dialaudit/metrics.hpp"
#include "dialaudit/policy.hpp"
#include "dialaudit/synthgen.hpp"
#include "support.hpp"

using namespace dialaudit;
using namespace testsupport;

TEST_CASE("generation is reproducible and seed-sensitive") {
    SynthSpec spec;
    spec.num_dialogues = 25;
    spec.seed = 77;
    Corpus a = generate(spec);
    Corpus b = generate(spec);
    CHECK(a == b);

    spec.seed = 78;
    Corpus c = generate(spec);
    CHECK_FALSE(a == c);
}

TEST_CASE("uninjected corpora are unambiguous at k >= horizon") {
    for (size_t horizon : {size_t{1}, size_t{2}, size_t{4}}) {
        SynthSpec spec;
        spec.num_dialogues = 60;
        spec.seed = 100 + horizon;
        spec.horizon = horizon;
        Corpus c = generate(spec);
        for (const auto& d : c.dialogues) validate_dialogue(d);
        auto [ok, conflicts] = verify_unambiguous(c, horizon);
        CHECK(ok);
        auto [ok_wider, _] = verify_unambiguous(c, horizon + 3);
        CHECK(ok_wider);
    }
}

TEST_CASE("injections concentrate all conflicts on the injected keys") {
    SynthSpec spec;
    spec.num_dialogues = 120;
    spec.seed = 9;
    spec.horizon = 1;
    spec.label_vocab = 6;
    spec.injections.push_back({"", {{1, 2.0 / 3.0}, {2, 1.0 / 3.0}}});
    Corpus c = generate(spec);

    auto conflicts = find_conflicts(c, 1);
    REQUIRE(conflicts.size() == 1);
    const Conflict& conflict = conflicts[0];
    CHECK(conflict.alternatives.size() == 2);
    long long n1 = conflict.alternatives.at("Synth-A1").second;
    long long n2 = conflict.alternatives.at("Synth-A2").second;
    long long total = n1 + n2;
    CHECK(total > 50);  // the most frequent key was injected
    // seed-pinned sample of a 2/3-1/3 mixture
    CHECK(double(n1) / double(total) > 0.55);
    CHECK(double(n1) / double(total) < 0.78);

    // prune removes only dialogues that pass through the injected key
    PruneResult result = prune(c, 1);
    for (const auto& removed : result.removed) {
        bool passes = false;
        for (const auto& d : c.dialogues) {
            if (d.id != removed.id) continue;
            for (size_t p = 0; p < d.events.size(); ++p)
                if (d.events[p].kind() == Event::Kind::Action &&
                    window(d.events, p, 1) == conflict.key)
                    passes = true;
        }
        CHECK(passes);
    }
}

TEST_CASE("expected_train_accuracy equals the measured accuracy exactly") {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        SynthSpec spec;
        spec.num_dialogues = 40;
        spec.seed = seed;
        spec.horizon = 2;
        spec.label_vocab = 5;
        spec.injections.push_back({"", {{0, 0.5}, {3, 0.5}}});
        Corpus c = generate(spec);

        for (size_t k : {size_t{2}, size_t{4}}) {
            auto [expected_correct, expected_total] = expected_train_accuracy(spec, c, k);
            HistoryIndex index = fit(c, k);
            ScoreRow row = evaluate(PredictorKind::Memorize, index, c, Corpus{});
            // exact rational equality via cross multiplication
            CHECK(row.train_correct * expected_total == expected_correct * row.train_total);
            CHECK(row.train_total == expected_total);
        }
    }
}

TEST_CASE("expected_train_accuracy is one without injections") {
    SynthSpec spec;
    spec.num_dialogues = 30;
    spec.seed = 4;
    spec.horizon = 2;
    Corpus c = generate(spec);
    auto [correct, total] = expected_train_accuracy(spec, c, 2);
    CHECK(correct == total);
    CHECK(total > 0);
}

TEST_CASE("expected_train_accuracy rejects k below the horizon") {
    SynthSpec spec;
    spec.horizon = 3;
    spec.num_dialogues = 5;
    Corpus c = generate(spec);
    CHECK_THROWS_AS(expected_train_accuracy(spec, c, 2), InputError);
}

TEST_CASE("infeasible specs are rejected") {
    SynthSpec bad_probs;
    bad_probs.injections.push_back({"", {{0, 0.5}, {1, 0.6}}});
    CHECK_THROWS_AS(generate(bad_probs), InputError);

    SynthSpec bad_label;
    bad_label.label_vocab = 2;
    bad_label.injections.push_back({"", {{0, 0.5}, {7, 0.5}}});
    CHECK_THROWS_AS(generate(bad_label), InputError);

    SynthSpec bad_pattern;
    bad_pattern.num_dialogues = 5;
    bad_pattern.injections.push_back({"no-such-event", {{0, 0.5}, {1, 0.5}}});
    CHECK_THROWS_AS(generate(bad_pattern), InputError);

    SynthSpec zero;
    zero.num_dialogues = 0;
    CHECK_THROWS_AS(generate(zero), InputError);
}

TEST_CASE("spec JSON round-trips") {
    SynthSpec spec;
    spec.num_dialogues = 12;
    spec.horizon = 3;
    spec.seed = 99;
    spec.injections.push_back({"opt_1", {{0, 0.25}, {1, 0.75}}});
    SynthSpec back = SynthSpec::from_json(spec.to_json());
    CHECK(back.num_dialogues == spec.num_dialogues);
    CHECK(back.horizon == spec.horizon);
    CHECK(back.seed == spec.seed);
    REQUIRE(back.injections.size() == 1);
    CHECK(back.injections[0].key_pattern == "opt_1");
    CHECK(back.injections[0].alternatives == spec.injections[0].alternatives);
    CHECK(generate(back) == generate(spec));
}
