#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rerl/guard.hpp"
#include "rerl/rational.hpp"

namespace rerl {

// A convex clock set represented as a difference-bound matrix over the
// clocks plus a reference variable fixed at 0.  All operations return
// canonical zones; emptiness and equality are therefore decidable by
// entrywise comparison.  Bounds are rational so the same structure can
// carry timestamp systems and sampled points.

class Zone {
  public:
    // Bound on a difference: value + strictness, or unbounded.
    struct Bound {
        Rat value{0};
        bool strict = false;
        bool inf = false;

        static Bound infinite() { return {Rat(0), false, true}; }
        static Bound of(Rat v, bool s) { return {std::move(v), s, false}; }
        bool operator==(const Bound& o) const;
    };

    // A zero-clock placeholder (only the reference variable).
    Zone() : Zone(0) {}
    // All variables equal to 0.
    static Zone zero_point(int num_clocks);
    // All variables >= 0, otherwise unconstrained.
    static Zone universal(int num_clocks);

    int num_clocks() const { return n_; }
    bool is_empty() const { return empty_; }

    // Delay closure: upper bounds against the reference removed.
    Zone future() const;
    Zone with_reset(int clock) const;
    Zone conjoined(const Guard& g) const;
    Zone conjoined(int clock, Rel rel, const Rat& constant) const;
    // Difference constraint x_i - x_j rel c; index -1 denotes the
    // reference 0 (so (-1, j) constrains -x_j and (i, -1) constrains x_i).
    Zone conjoined_diff(int i, int j, Rel rel, const Rat& constant) const;
    Zone conjoined(const KClass& cls) const;

    bool contains(const ClockValuation& v) const;
    // A point of the zone, or nullopt when empty.  Deterministic: clocks are
    // fixed in index order to the midpoint of their residual interval
    // (lower bound + 1/2 when unbounded above, the point itself when pinned).
    std::optional<ClockValuation> sample() const;

    bool operator==(const Zone& o) const;
    std::string to_string(const Alphabet& sigma) const;

  private:
    explicit Zone(int num_clocks);
    int n_ = 0;
    bool empty_ = false;
    std::vector<Bound> d_;  // (n+1) x (n+1), row-major; variable 0 = reference

    Bound& at(int i, int j) { return d_[static_cast<size_t>(i) * (n_ + 1) + j]; }
    const Bound& at(int i, int j) const {
        return d_[static_cast<size_t>(i) * (n_ + 1) + j];
    }
    void canonicalize();
};

}  // namespace rerl
