#include "rerl/teacher.hpp"

namespace rerl {

SimTeacher::SimTeacher(Rera target) : target_(std::move(target)) {
    target_.validate();
}

bool SimTeacher::member(const TimedWord& w) {
    ++membership_calls_;
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    bool verdict = target_.member(w);
    cache_.emplace(w, verdict);
    return verdict;
}

std::optional<EquivCounterexample> SimTeacher::equivalence(const Rera& hypothesis) {
    ++equivalence_queries_;
    auto diff = find_difference(target_, hypothesis);
    if (!diff) return std::nullopt;
    // Label by the target's verdict (find_difference already guarantees
    // the two automata disagree on the word).
    return EquivCounterexample{diff->word, diff->accepted_by_first};
}

}  // namespace rerl
