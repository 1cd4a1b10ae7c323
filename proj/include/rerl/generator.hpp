#pragma once

#include <cstdint>
#include <random>

#include "rerl/rera.hpp"

namespace rerl {

// Deterministic RNG wrapper: all draws go through explicit modulo reduction
// of the raw 64-bit stream so sequences are reproducible byte-for-byte.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }
    int below(int n);
    bool flip() { return below(2) == 1; }

  private:
    std::mt19937_64 engine_;
};

struct GenParams {
    int locations = 3;
    int alphabet_size = 2;
    std::int64_t k = 3;
};

// A random valid automaton: per (location, action) the action clock's axis
// is cut into at most three intervals, each either blocking or carrying a
// transition; some cells get one extra one-sided atom on another clock.
Rera random_rera(const GenParams& params, Rng& rng);

// A random timed word with quarter-grain delays bounded by k + 1.
TimedWord random_word(const Alphabet& alphabet, std::int64_t k, size_t length,
                      Rng& rng);

}  // namespace rerl
