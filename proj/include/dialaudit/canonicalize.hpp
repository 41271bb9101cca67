#pragma once

// The ordered simplification ladder: status-slot insertion, action-label
// merging, Reqmore filtering. Each stage is a pure corpus-to-corpus
// transform recorded in stage_log; a stage already in the log is a no-op,
// which makes every stage idempotent including the log itself.

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"
#include "dialaudit/multiwoz.hpp"

namespace dialaudit {

inline constexpr const char* kStageStatusSlots = "status_slots";
inline constexpr const char* kStageMergeLabels = "merge_labels";
inline constexpr const char* kStageDropReqmore = "drop_reqmore";
inline constexpr const char* kStageEndOfTurn = "end_of_turn_markers";

struct StageConfig {
    bool status_slots = true;
    bool merge_labels = true;
    bool drop_reqmore = true;
    std::map<std::string, std::string> merge_table;  // act_type -> act_type

    static StageConfig defaults();

    nlohmann::json to_json() const;
    static StageConfig from_json(const nlohmann::json& j);
};

// Inserts a kb_status event after each user event whose venue domain has a
// KB table and whose status changed from the previous value (implicit
// initial value: available). A Booking-Book action gains a
// "<domain>_status": "booked" slot and pins that venue's status to booked.
Corpus add_status_slots(const Corpus& corpus, const KbTables& kb);

// Rewrites every action's act_type through the merge table.
Corpus merge_labels(const Corpus& corpus, const StageConfig& cfg);

// Deletes General-Reqmore actions except where they are the only action of
// their system turn.
Corpus drop_reqmore(const Corpus& corpus);

// Appends a synthetic General-EndOfTurn action after each system turn, for
// sensitivity analysis of turn-termination prediction.
Corpus append_end_of_turn_markers(const Corpus& corpus);

// Enabled stages in the fixed order above. kb may be null when the
// status_slots stage is disabled or the corpus carries no belief provenance.
Corpus apply_stages(const Corpus& corpus, const StageConfig& cfg, const KbTables* kb);

}  // namespace dialaudit
