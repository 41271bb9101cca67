#pragma once

// MultiWOZ-2.1-shaped loader: dataset JSON plus per-domain venue tables,
// user intents and slots inferred from belief-state deltas, Booking-Book
// domains inherited from the history.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"

namespace dialaudit {

// Field-name mapping from the on-disk layout to the accessors we need.
// Tolerates schema drift across dataset revisions; every accessor is probed
// on load and failures abort with a schema error.
struct SchemaMap {
    std::string data_file = "data.json";
    std::string text_key = "text";
    std::string belief_key = "metadata";
    std::string acts_key = "dialog_act";
    std::map<std::string, std::string> kb_files;  // venue domain -> file name

    static SchemaMap multiwoz_default();

    nlohmann::json to_json() const;
    static SchemaMap from_json(const nlohmann::json& j);
};

// A venue table: rows of lowercased column -> normalized value.
using KbTable = std::vector<std::map<std::string, std::string>>;
using KbTables = std::map<std::string, KbTable>;

// Loads every KB file named in the schema; a listed-but-missing file is an
// InputError.
KbTables load_kb_tables(const std::string& dataset_dir, const SchemaMap& schema);

struct MultiwozLoadResult {
    Corpus corpus;
    long long skipped = 0;
};

// Parses every completely annotated dialogue into a DialogueRecord;
// dialogues missing act or belief annotations are counted, not dropped
// silently. Belief states are retained per user turn as provenance.
MultiwozLoadResult load_multiwoz(const std::string& dataset_dir, const SchemaMap& schema);

// Slot-tag set from the belief delta (new or changed values; deletions are
// non-events); intent bye iff this is the last user turn and the delta is
// empty.
Event infer_user_event(const BeliefState& prev_belief, const BeliefState& next_belief,
                       bool is_last_user_turn, long long* deletions = nullptr);

// Domain of the most recent event carrying a venue domain; "unknown" when
// the history has none.
std::string infer_booking_domain(const std::vector<Event>& history);

// Venue count under the belief's specific-valued constraints (do-not-care
// slots unconstrained, non-column slots ignored): 0 -> NA, 1 -> unique,
// >=2 -> available. Matching is case-insensitive exact equality after
// whitespace normalization.
std::string query_kb_status(const BeliefState& belief, const std::string& venue_domain,
                            const KbTables& kb);

// True for the closed set of MultiWOZ venue domains.
bool is_venue_domain(const std::string& domain);

}  // namespace dialaudit
