#include <doctest.h>

#include "dialaudit/canonicalize.hpp"
#include "dialaudit/multiwoz.hpp"
#include "support.hpp"

using namespace dialaudit;
using namespace testsupport;

namespace {

const std::string kMiniDir = std::string(TEST_DATA_DIR) + "/multiwoz_mini";

Corpus mini_corpus() {
    return load_multiwoz(kMiniDir, SchemaMap::multiwoz_default()).corpus;
}

KbTables mini_kb() { return load_kb_tables(kMiniDir, SchemaMap::multiwoz_default()); }

}  // namespace

TEST_CASE("add_status_slots reproduces the annotated hotel example") {
    Corpus with_status = add_status_slots(mini_corpus(), mini_kb());
    CHECK(with_status.stage_log == std::vector<std::string>{"status_slots"});

    std::string expected =
        "* inform{\"hotel_area\": \"specific\"}\n"
        "  - Hotel-Select\n"
        "* inform{\"hotel_name\": \"specific\"}\n"
        "  - slot{\"hotel_status\": \"unique\"}\n"
        "  - Hotel-Booking-Book{\"hotel_reference\": \"specific\", "
        "\"hotel_status\": \"booked\"}\n"
        "  - Hotel-Inform\n"
        "* bye\n"
        "  - General-Goodbye\n";
    CHECK(serialize_dialogue(with_status.dialogues[0]) == expected);

    // NoOffer situation: the NA status precedes the turn's actions
    std::string expected_restaurant =
        "* inform{\"restaurant_area\": \"specific\", \"restaurant_food\": \"specific\"}\n"
        "  - slot{\"restaurant_status\": \"NA\"}\n"
        "  - General-Reqmore\n"
        "  - Restaurant-NoOffer{\"restaurant_food\": \"specific\"}\n"
        "* inform{\"restaurant_food\": \"do-not-care\"}\n"
        "  - slot{\"restaurant_status\": \"available\"}\n"
        "  - Restaurant-Recommend{\"restaurant_name\": \"specific\"}\n"
        "* bye\n"
        "  - General-Goodbye\n";
    CHECK(serialize_dialogue(with_status.dialogues[1]) == expected_restaurant);
}

TEST_CASE("add_status_slots leaves belief-free dialogues unchanged") {
    Corpus c = corpus({hotel_example()});  // no turn_beliefs
    Corpus out = add_status_slots(c, KbTables{});
    CHECK(out.dialogues == c.dialogues);
}

TEST_CASE("merge_labels rewrites act types through the table") {
    Corpus c = corpus({dialogue("d", {user("inform", {{"hotel_area", "specific"}}),
                                      action("hotel", "Recommend"),
                                      user("inform"),
                                      action("general", "Greet"),
                                      user("inform"),
                                      action("hotel", "Booking-Book"),
                                      action("hotel", "NoOffer")})});
    Corpus merged = merge_labels(c, StageConfig::defaults());
    CHECK(merged.dialogues[0].events[1].action().act_type == "Reply");
    CHECK(merged.dialogues[0].events[3].action().act_type == "Welcome");
    CHECK(merged.dialogues[0].events[5].action().act_type == "Booking-Book");
    CHECK(merged.dialogues[0].events[6].action().act_type == "NoOffer");
    CHECK(merged.dialogues[0].events.size() == c.dialogues[0].events.size());
    CHECK(merged.vocab.act_types.count("Recommend") == 0);
    CHECK(merged.vocab.act_types.count("Reply") == 1);
}

TEST_CASE("drop_reqmore deletes only accompanied reqmores") {
    Corpus c = corpus({dialogue("d", {user("inform", {{"hotel_area", "specific"}}),
                                      action("hotel", "Reply"),
                                      action("general", "Reqmore"),
                                      user("inform", {{"hotel_name", "specific"}}),
                                      action("general", "Reqmore"),
                                      user("bye"),
                                      action("general", "Goodbye")})});
    Corpus dropped = drop_reqmore(c);
    const auto& events = dropped.dialogues[0].events;
    REQUIRE(events.size() == 6);
    CHECK(events[1].action().act_type == "Reply");
    CHECK(events[2].kind() == Event::Kind::User);
    CHECK(events[3].action().act_type == "Reqmore");  // sole action of its turn
    CHECK(events[5].action().act_type == "Goodbye");
}

TEST_CASE("stages are idempotent") {
    Corpus base = mini_corpus();
    KbTables kb = mini_kb();
    Corpus once = add_status_slots(base, kb);
    CHECK(add_status_slots(once, kb) == once);

    Corpus merged = merge_labels(once, StageConfig::defaults());
    CHECK(merge_labels(merged, StageConfig::defaults()) == merged);

    Corpus slim = drop_reqmore(merged);
    CHECK(drop_reqmore(slim) == slim);
}

TEST_CASE("apply_stages runs the ladder in the fixed order") {
    KbTables kb = mini_kb();
    Corpus out = apply_stages(mini_corpus(), StageConfig::defaults(), &kb);
    CHECK(out.stage_log ==
          std::vector<std::string>{"status_slots", "merge_labels", "drop_reqmore"});

    // the restaurant dialogue after the full ladder
    std::string expected =
        "* inform{\"restaurant_area\": \"specific\", \"restaurant_food\": \"specific\"}\n"
        "  - slot{\"restaurant_status\": \"NA\"}\n"
        "  - Restaurant-NoOffer{\"restaurant_food\": \"specific\"}\n"
        "* inform{\"restaurant_food\": \"do-not-care\"}\n"
        "  - slot{\"restaurant_status\": \"available\"}\n"
        "  - Restaurant-Reply{\"restaurant_name\": \"specific\"}\n"
        "* bye\n"
        "  - General-Welcome\n";
    CHECK(serialize_dialogue(out.dialogues[1]) == expected);
}

TEST_CASE("apply_stages demands KB tables only when needed") {
    CHECK_THROWS_AS(apply_stages(mini_corpus(), StageConfig::defaults(), nullptr), InputError);

    StageConfig no_status = StageConfig::defaults();
    no_status.status_slots = false;
    Corpus out = apply_stages(mini_corpus(), no_status, nullptr);
    CHECK(out.stage_log == std::vector<std::string>{"merge_labels", "drop_reqmore"});

    // belief-free corpora pass through the status stage without tables
    Corpus synth = corpus({hotel_example()});
    Corpus ok = apply_stages(synth, StageConfig::defaults(), nullptr);
    CHECK(ok.stage_log.size() == 3);
}

TEST_CASE("end-of-turn markers close every system turn") {
    Corpus c = corpus({hotel_example()});
    Corpus marked = append_end_of_turn_markers(c);
    const auto& events = marked.dialogues[0].events;
    // hotel_example has 3 turns -> 3 markers appended
    REQUIRE(events.size() == c.dialogues[0].events.size() + 3);
    CHECK(events[2].action().act_type == "EndOfTurn");
    CHECK(events.back().action().act_type == "EndOfTurn");
    CHECK(append_end_of_turn_markers(marked) == marked);
}
