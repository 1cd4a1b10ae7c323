#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rerl/guard.hpp"
#include "rerl/zone.hpp"

namespace rerl {

// ============================================================================
// Word flavours
// ============================================================================

struct TimedLetter {
    Rat delay{0};
    int action = 0;

    bool operator==(const TimedLetter& o) const {
        return delay == o.delay && action == o.action;
    }
    bool operator<(const TimedLetter& o) const {
        if (delay != o.delay) return delay < o.delay;
        return action < o.action;
    }
};

using TimedWord = std::vector<TimedLetter>;

struct ResetLetter {
    Rat delay{0};
    int action = 0;
    bool reset = false;

    bool operator==(const ResetLetter& o) const {
        return delay == o.delay && action == o.action && reset == o.reset;
    }
    bool operator<(const ResetLetter& o) const {
        if (delay != o.delay) return delay < o.delay;
        if (action != o.action) return action < o.action;
        return reset < o.reset;
    }
};

using TimedWordWithResets = std::vector<ResetLetter>;

struct GuardedLetter {
    Guard guard;
    int action = 0;
    bool reset = false;

    bool operator==(const GuardedLetter& o) const {
        return guard == o.guard && action == o.action && reset == o.reset;
    }
};

using GuardedWordWithResets = std::vector<GuardedLetter>;

// One step of a word whose timing information is a K-equivalence class:
// the class is taken at the moment of the action (after the delay).
struct ClassLetter {
    KClass at_action;
    int action = 0;
    bool reset = false;

    bool operator==(const ClassLetter& o) const {
        return at_action == o.at_action && action == o.action && reset == o.reset;
    }
};

using KClosedWord = std::vector<ClassLetter>;

// ============================================================================
// Conversions and runs
// ============================================================================

TimedWord strip_resets(const TimedWordWithResets& w);
TimedWordWithResets with_resets(const TimedWord& w, const std::vector<bool>& resets);

// The clock valuations along a word: before each delay and at each action.
struct RunStep {
    ClockValuation before;     // v_i
    ClockValuation at_action;  // u_i = v_i + t_i
};

std::vector<RunStep> run_of(const TimedWordWithResets& w, int num_clocks);

// Full-length satisfaction: same actions and resets, and every action-time
// valuation lies in the corresponding guard.
bool satisfies(const TimedWordWithResets& w, const GuardedWordWithResets& g,
               int num_clocks);

// The zones reachable along a guarded word: the start zone is the delay
// closure of the zero point and each step intersects with the guard,
// applies the reset, and closes under delay.  Returns |g| + 1 zones.
std::vector<Zone> zone_states_of(const GuardedWordWithResets& g, int num_clocks);

// The class word induced by a timed word with resets.
KClosedWord k_closed_word_of(const TimedWordWithResets& w, int num_clocks,
                             std::int64_t k);

// Full-length satisfaction of a class word.
bool models(const TimedWordWithResets& w, const KClosedWord& kw, int num_clocks);

// ============================================================================
// Word combinators
// ============================================================================

// Positionwise convex combination of delays: lambda * w1 + (1-lambda) * w2.
// Requires equal length and equal action projections.
TimedWord lambda_sum(const Rat& lambda, const TimedWord& w1, const TimedWord& w2);

// Splice: for positions of w1, integer part of w1's delay plus fractional
// part of w2's delay; beyond |w1|, w2's letters unchanged.  Requires
// |w1| <= |w2| and equal action projections on the shared prefix.
TimedWord splice(const TimedWord& w1, const TimedWord& w2);

// ============================================================================
// Text form
// ============================================================================
// Space-separated letters "delay:action", delays as decimals or p/q.
// The empty word is the empty string.

std::string format_timed_word(const TimedWord& w, const Alphabet& sigma);
std::optional<TimedWord> parse_timed_word(const std::string& text, const Alphabet& sigma);
// Debug form with "!" appended to resetting letters.
std::string format_reset_word(const TimedWordWithResets& w, const Alphabet& sigma);

}  // namespace rerl
