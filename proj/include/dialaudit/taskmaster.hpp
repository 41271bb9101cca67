#pragma once

// Taskmaster-1 self-dialogue loader: delexicalizes annotated segments and
// tags utterances with dialogue domain, regex-classified domain, and the
// segment annotation signature.

#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialaudit/corpus.hpp"

namespace dialaudit {

struct SegmentAnnotation {
    size_t start = 0;   // character offsets into the utterance
    size_t end = 0;
    std::string label;  // annotation token
};

// Ordered (domain, patterns) rules; first match wins, fallthrough "none".
class DomainRegexRules {
public:
    static DomainRegexRules defaults();
    static DomainRegexRules from_json(const nlohmann::json& j);
    static DomainRegexRules load(const std::string& path);

    // Regex-classified domain of an utterance.
    std::string classify(const std::string& utterance) const;

    int version() const { return version_; }

private:
    struct Rule {
        std::string domain;
        std::vector<std::regex> patterns;
    };
    std::vector<Rule> rules_;
    int version_ = 0;
};

// Replaces each annotated span by a <label> placeholder, right-to-left so
// offsets stay valid. Overlapping spans resolve by keeping the longer.
// Throws InputError when a span exceeds the utterance bounds.
std::string delexicalize(const std::string& utterance,
                         const std::vector<SegmentAnnotation>& segments);

// Label with domain = dialogue domain, act_type = regex-classified domain,
// slots = the sorted segment-label set, all tagged specific.
CanonicalLabel tag_utterance(const std::string& utterance, const std::string& dialogue_domain,
                             const std::vector<SegmentAnnotation>& segments,
                             const DomainRegexRules& rules);

struct TaskmasterLoadResult {
    Corpus corpus;
    long long skipped = 0;
};

// Loads the self-dialogues JSON array. Consecutive same-speaker turns merge,
// leading system turns and trailing user turns are dropped; all three are
// counted in the corpus stats.
TaskmasterLoadResult load_taskmaster(const std::string& path, const DomainRegexRules& rules);

}  // namespace dialaudit
