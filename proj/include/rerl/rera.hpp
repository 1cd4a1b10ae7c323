#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rerl/guard.hpp"
#include "rerl/words.hpp"

namespace rerl {

// A deterministic reset-free event-recording automaton: one clock per
// action, and an a-transition either resets exactly the clock of a or
// nothing.  Words with no enabled transition block and are rejected.

struct Transition {
    int source = 0;
    int action = 0;
    Guard guard;
    bool reset = false;
    int target = 0;

    bool operator==(const Transition&) const = default;
};

struct SimResult {
    bool accepted = false;
    // Index of the first letter with no enabled transition, if any.
    std::optional<size_t> blocked_at;
    // Reset flags realized along the processed prefix.
    std::vector<bool> resets;
    // Locations visited, starting with the initial one.
    std::vector<int> visited;
};

class Rera {
  public:
    Alphabet alphabet;
    std::vector<std::string> location_names;
    int initial = 0;
    std::vector<bool> accepting;
    std::int64_t max_constant = 0;
    std::vector<Transition> transitions;

    int num_locations() const { return static_cast<int>(location_names.size()); }
    int num_clocks() const { return alphabet.size(); }

    // Throws on structural problems: out-of-range indices, duplicate
    // location names, guard constants above max_constant, or two same-source
    // same-action transitions with overlapping guards.
    void validate() const;

    // Transition indices leaving `source` on `action`.
    std::vector<int> outgoing(int source, int action) const;
    // The unique enabled transition, if any.
    std::optional<int> step(int source, int action, const ClockValuation& u) const;

    SimResult simulate(const TimedWord& w) const;
    bool member(const TimedWord& w) const;

    // A language-equivalent automaton in which every (location, action)
    // totally partitions the clock space, with a rejecting sink absorbing
    // the previously blocking valuations.
    Rera completed() const;

    std::string to_dot() const;
};

// JSON serialization of the .rera format.
Rera parse_rera(const std::string& json_text);
Rera load_rera(const std::string& path);
std::string serialize_rera(const Rera& a);

}  // namespace rerl
