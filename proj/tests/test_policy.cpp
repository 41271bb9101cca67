#include <doctest.h>

#include "dialaudit/policy.hpp"
#include "dialaudit/synthgen.hpp"
#include "support.hpp"

using namespace dialaudit;
using namespace testsupport;

namespace {

Corpus shared_prefix_corpus() {
    // Three dialogues over the same one-turn prefix, diverging into A, A, B.
    return corpus({dialogue("d1", {user("inform", {{"hotel_area", "specific"}}),
                                   action("synth", "A")}),
                   dialogue("d2", {user("inform", {{"hotel_area", "specific"}}),
                                   action("synth", "A")}),
                   dialogue("d3", {user("inform", {{"hotel_area", "specific"}}),
                                   action("synth", "B")})});
}

}  // namespace

TEST_CASE("fit counts every action exactly once") {
    Corpus c = corpus({hotel_example()});
    HistoryIndex index = fit(c, 10);
    CHECK(index.k == 10);
    CHECK(index.indexed_actions == 4);
    long long total = 0;
    for (const auto& [key, counts] : index.table)
        for (const auto& [label, count] : counts) total += count;
    CHECK(total == 4);
    CHECK(index.table.size() <= 4);
}

TEST_CASE("fit is linear: identical dialogues double the counts") {
    DialogueRecord d1 = hotel_example();
    DialogueRecord d2 = hotel_example();
    d2.id = "HOTEL2";
    HistoryIndex once = fit(corpus({d1}), 10);
    HistoryIndex twice = fit(corpus({d1, d2}), 10);
    REQUIRE(once.table.size() == twice.table.size());
    for (const auto& [key, counts] : once.table) {
        REQUIRE(twice.table.count(key) == 1);
        for (const auto& [label, count] : counts)
            CHECK(twice.table.at(key).at(label) == 2 * count);
    }
}

TEST_CASE("fit accumulates a shared prefix into one key") {
    HistoryIndex index = fit(shared_prefix_corpus(), 10);
    REQUIRE(index.table.size() == 1);
    const auto& counts = index.table.begin()->second;
    CHECK(counts.at("Synth-A") == 2);
    CHECK(counts.at("Synth-B") == 1);
}

TEST_CASE("fit rejects bad input") {
    CHECK_THROWS_AS(fit(Corpus{}, 10), InputError);
    CHECK_THROWS_AS(fit(corpus({hotel_example()}), 0), InputError);
}

TEST_CASE("predict_memorize returns the majority with support") {
    Corpus c = shared_prefix_corpus();
    HistoryIndex index = fit(c, 10);
    std::vector<Event> history = {user("inform", {{"hotel_area", "specific"}})};
    Prediction p = predict_memorize(index, history);
    CHECK(p.label.key() == "Synth-A");
    CHECK(p.support == 2);
    CHECK(p.matched_suffix_length == 1);
    CHECK_FALSE(p.fallback);
}

TEST_CASE("predict_memorize breaks ties lexicographically") {
    Corpus c = corpus({dialogue("d1", {user("inform"), action("synth", "B")}),
                       dialogue("d2", {user("inform"), action("synth", "A")})});
    HistoryIndex index = fit(c, 5);
    Prediction p = predict_memorize(index, {user("inform")});
    CHECK(p.label.key() == "Synth-A");
    CHECK(p.support == 1);
}

TEST_CASE("predict_memorize falls back to the global majority on unseen history") {
    HistoryIndex index = fit(shared_prefix_corpus(), 10);
    std::vector<Event> novel = {user("inform", {{"train_day", "specific"}})};
    Prediction p = predict_memorize(index, novel);
    CHECK(p.fallback);
    CHECK(p.matched_suffix_length == 0);
    CHECK(p.label.key() == "Synth-A");  // global majority {A:2, B:1}
    CHECK(p.support == 2);
}

TEST_CASE("predict_backoff equals memorize on full-window hits") {
    SynthSpec spec;
    spec.num_dialogues = 40;
    spec.seed = 5;
    spec.horizon = 2;
    Corpus c = generate(spec);
    HistoryIndex index = fit(c, 4);
    for (const auto& d : c.dialogues) {
        std::vector<Event> history;
        for (const auto& e : d.events) {
            if (e.kind() == Event::Kind::Action) {
                // every training window is present, so both must agree
                Prediction memorized = predict_memorize(index, history);
                Prediction backed = predict_backoff(index, history);
                REQUIRE(memorized.label == backed.label);
                REQUIRE(memorized.matched_suffix_length == backed.matched_suffix_length);
            }
            history.push_back(e);
        }
    }
}

TEST_CASE("predict_backoff finds the longest seen suffix") {
    // Training: a dialogue whose first action follows the single user event
    // [inform{hotel_area}], giving a length-1 key.
    Corpus c = corpus({dialogue("d1", {user("inform", {{"hotel_area", "specific"}}),
                                       action("hotel", "Select"),
                                       user("inform", {{"hotel_name", "specific"}}),
                                       action("hotel", "Reply")})});
    HistoryIndex index = fit(c, 3);

    // Unseen at length 3 and 2; the length-1 suffix matches the trained key.
    std::vector<Event> history = {user("inform", {{"train_day", "specific"}}),
                                  action("train", "Reply"),
                                  user("inform", {{"hotel_area", "specific"}})};
    // brute-force suffix enumeration oracle
    size_t expected_len = 0;
    for (size_t len = 3; len >= 1; --len) {
        if (index.table.count(window(history, history.size(), len))) {
            expected_len = len;
            break;
        }
    }
    REQUIRE(expected_len == 1);
    Prediction p = predict_backoff(index, history);
    CHECK(p.matched_suffix_length == 1);
    CHECK(p.label.key() == "Hotel-Select");
    CHECK_FALSE(p.fallback);

    // Totally novel event: global majority fallback.
    Prediction fallback = predict_backoff(index, {user("bye")});
    CHECK(fallback.fallback);
    CHECK(fallback.matched_suffix_length == 0);
}

TEST_CASE("predictions ignore events beyond the window") {
    Corpus c = corpus({hotel_example()});
    HistoryIndex index = fit(c, 2);
    std::vector<Event> history = {user("inform", {{"hotel_area", "specific"}}),
                                  action("hotel", "Select"),
                                  user("inform", {{"hotel_name", "specific"}})};
    Prediction base_m = predict_memorize(index, history);
    Prediction base_b = predict_backoff(index, history);
    std::vector<Event> mutated = history;
    mutated[0] = user("inform", {{"restaurant_food", "do-not-care"}});
    CHECK(predict_memorize(index, mutated).label == base_m.label);
    CHECK(predict_backoff(index, mutated).label == base_b.label);
}

TEST_CASE("closed form matches a hand scan of training accuracy") {
    Corpus c = shared_prefix_corpus();
    HistoryIndex index = fit(c, 10);
    auto [correct, total] = closed_form_train_accuracy(index);
    CHECK(correct == 2);
    CHECK(total == 3);

    long long measured = 0, positions = 0;
    for (const auto& d : c.dialogues) {
        std::vector<Event> history;
        for (const auto& e : d.events) {
            if (e.kind() == Event::Kind::Action) {
                ++positions;
                if (predict_memorize(index, history).label == e.action()) ++measured;
            }
            history.push_back(e);
        }
    }
    CHECK(measured == correct);
    CHECK(positions == total);
}

TEST_CASE("index serialization round-trips and is deterministic") {
    SynthSpec spec;
    spec.num_dialogues = 20;
    spec.seed = 11;
    Corpus c = generate(spec);
    HistoryIndex a = fit(c, 3);
    HistoryIndex b = fit(c, 3);
    CHECK(a.to_json().dump() == b.to_json().dump());

    HistoryIndex back = HistoryIndex::from_json(a.to_json());
    CHECK(back.to_json().dump() == a.to_json().dump());
    Prediction pa = predict_memorize(a, c.dialogues[0].events);
    Prediction pb = predict_memorize(back, c.dialogues[0].events);
    CHECK(pa.label == pb.label);
}
