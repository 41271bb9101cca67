#include <doctest.h>

#include <algorithm>
#include <random>

#include "dialaudit/json_io.hpp"
#include "dialaudit/taskmaster.hpp"
#include "support.hpp"

using namespace dialaudit;
using namespace testsupport;

namespace {

const std::string kMiniFile = std::string(TEST_DATA_DIR) + "/taskmaster_mini/self-dialogs.json";
const std::string kRulesFile = std::string(PROJECT_DATA_DIR) + "/taskmaster_domain_rules.json";

}  // namespace

TEST_CASE("delexicalize replaces annotated spans") {
    std::string utterance = "table for 4 at Luigi's";
    std::vector<SegmentAnnotation> segments = {{10, 11, "num_guests"},
                                               {15, 22, "restaurant_name"}};
    // validate the offsets against the raw string before substitution
    REQUIRE(utterance.substr(10, 1) == "4");
    REQUIRE(utterance.substr(15, 7) == "Luigi's");
    CHECK(delexicalize(utterance, segments) == "table for <num_guests> at <restaurant_name>");
}

TEST_CASE("delexicalize without segments is the identity") {
    CHECK(delexicalize("no segments here", {}) == "no segments here");
    std::string once = delexicalize("table for 4", {{10, 11, "n"}});
    CHECK(delexicalize(once, {}) == once);  // idempotent on its own output
}

TEST_CASE("delexicalize accounts for every character on adjacent spans") {
    std::string utterance = "aaabbb rest";
    std::vector<SegmentAnnotation> segments = {{0, 3, "x"}, {3, 6, "y"}};
    std::string out = delexicalize(utterance, segments);
    CHECK(out == "<x><y> rest");
    // length oracle: output = input - span lengths + placeholder lengths
    size_t expected = utterance.size() - (3 + 3) + (1 + 2) + (1 + 2);
    CHECK(out.size() == expected);
}

TEST_CASE("delexicalize keeps the longer of two overlapping spans") {
    std::string utterance = "the grand hotel downtown";
    std::vector<SegmentAnnotation> segments = {{4, 15, "hotel_name"}, {10, 15, "type"}};
    CHECK(delexicalize(utterance, segments) == "the <hotel_name> downtown");
}

TEST_CASE("delexicalize rejects out-of-range spans") {
    CHECK_THROWS_AS(delexicalize("short", {{2, 99, "x"}}), InputError);
    CHECK_THROWS_AS(delexicalize("short", {{3, 3, "x"}}), InputError);
}

TEST_CASE("tag_utterance combines dialogue domain, regex domain and segments") {
    DomainRegexRules rules = DomainRegexRules::defaults();
    std::vector<SegmentAnnotation> segments = {{0, 9, "pizza_ordering.type.topping"}};
    CanonicalLabel label =
        tag_utterance("pepperoni on a large pizza", "pizza", segments, rules);
    CHECK(label.domain == "pizza");
    CHECK(label.act_type == "pizza");
    CHECK(label.slots == SlotTags{{"pizza_ordering.type.topping", "specific"}});

    // no keyword anywhere -> fallthrough none
    CanonicalLabel none = tag_utterance("ok sounds good", "pizza", {}, rules);
    CHECK(none.act_type == "none");

    // a movie dialogue whose utterance matches restaurant keywords
    CanonicalLabel crossed =
        tag_utterance("can i get a dinner reservation after the show", "movie", {}, rules);
    CHECK(crossed.domain == "movie");
    CHECK(crossed.act_type == "restaurant");
}

TEST_CASE("tag_utterance honors first-match-wins rule order") {
    DomainRegexRules rules = DomainRegexRules::defaults();
    // both restaurant ("dinner") and pizza ("pizza") match; restaurant is
    // listed first in the rule file
    CanonicalLabel label = tag_utterance("pizza for dinner", "pizza", {}, rules);
    CHECK(label.act_type == "restaurant");
}

TEST_CASE("tag_utterance is invariant under segment permutation") {
    DomainRegexRules rules = DomainRegexRules::defaults();
    std::vector<SegmentAnnotation> segments = {{0, 4, "b"}, {5, 9, "a"}, {10, 14, "c"}};
    CanonicalLabel base = tag_utterance("pizza please and more", "pizza", segments, rules);
    std::mt19937 rng(2);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(segments.begin(), segments.end(), rng);
        CHECK(tag_utterance("pizza please and more", "pizza", segments, rules) == base);
    }
}

TEST_CASE("the shipped rules file matches the built-in defaults") {
    DomainRegexRules from_file = DomainRegexRules::load(kRulesFile);
    DomainRegexRules built_in = DomainRegexRules::defaults();
    CHECK(from_file.version() == built_in.version());
    for (const std::string& probe :
         {"need an uber", "two movie tickets", "book a table", "a double espresso",
          "extra toppings", "my brakes squeak", "nothing relevant"}) {
        CHECK(from_file.classify(probe) == built_in.classify(probe));
    }
}

TEST_CASE("load_taskmaster repairs malformed alternation and tags turns") {
    TaskmasterLoadResult result = load_taskmaster(kMiniFile, DomainRegexRules::defaults());
    REQUIRE(result.corpus.dialogues.size() == 3);
    CHECK(result.skipped == 0);
    const CorpusStats& stats = result.corpus.stats;
    CHECK(stats.merged_turns == 1);
    CHECK(stats.dropped_leading_system == 1);
    CHECK(stats.dropped_trailing_user == 1);
    CHECK(stats.tagged_utterances == 5);
    CHECK(stats.regex_domain_mismatch == 1);  // "you are welcome" -> none

    const DialogueRecord& pizza = result.corpus.dialogues[0];
    CHECK(pizza.id == "dlg-pizza-001");
    CHECK(pizza.domains == std::set<std::string>{"pizza"});
    std::string expected_pizza =
        "* inform{\"pizza_ordering.size\": \"specific\", "
        "\"pizza_ordering.type.topping\": \"specific\"}\n"
        "  - Pizza-pizza\n"
        "* inform{\"pizza_ordering.size\": \"specific\", "
        "\"pizza_ordering.type.topping\": \"specific\"}\n"
        "  - Pizza-pizza\n";
    CHECK(serialize_dialogue(pizza) == expected_pizza);

    // merged user turn keeps both segment annotations with shifted offsets
    const DialogueRecord& uber = result.corpus.dialogues[1];
    REQUIRE(uber.events.size() >= 1);
    CHECK(uber.events[0].user().slots ==
          SlotTags{{"uber_lyft.location.from", "specific"}, {"uber_lyft.location.to", "specific"}});
    // final empty-segment user turn becomes a farewell
    CHECK(uber.events[2].user().intent == "bye");
    CHECK(uber.events[3].action().act_type == "none");

    const DialogueRecord& movie = result.corpus.dialogues[2];
    CHECK(movie.events.front().kind() == Event::Kind::User);
    CHECK(movie.events.front().user().slots ==
          SlotTags{{"movie_ticket.name.movie", "specific"}});
    CHECK(movie.events.back().action().act_type == "movie");
}

TEST_CASE("load_taskmaster rejects a non-array file") {
    CHECK_THROWS_AS(load_taskmaster(std::string(TEST_DATA_DIR) + "/multiwoz_mini/data.json",
                                    DomainRegexRules::defaults()),
                    InputError);
    CHECK_THROWS_AS(load_taskmaster("/nonexistent.json", DomainRegexRules::defaults()),
                    InputError);
}
