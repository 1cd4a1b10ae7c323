#pragma once

#include <optional>

#include "rerl/rera.hpp"

namespace rerl {

struct EquivCounterexample {
    TimedWord word;
    bool accepted_by_first = false;  // the other automaton disagrees
};

// Exhaustive timed-language comparison over the product of the completed
// automata, abstracted by clock regions.  Returns a counterexample of
// minimal discrete length (ties broken deterministically), or nullopt when
// the languages agree.  Requires equal alphabets.
std::optional<EquivCounterexample> find_difference(const Rera& a, const Rera& b);

bool equivalent(const Rera& a, const Rera& b);

}  // namespace rerl
