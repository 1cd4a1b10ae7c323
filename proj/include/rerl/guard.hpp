#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rerl/rational.hpp"

namespace rerl {

// ============================================================================
// Alphabet and clocks
// ============================================================================
// One clock per action, named x_<action>.  Clocks are addressed by the index
// of their action in the (sorted) alphabet.

class Alphabet {
  public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> actions);

    int size() const { return static_cast<int>(actions_.size()); }
    const std::string& action(int i) const { return actions_.at(i); }
    const std::vector<std::string>& actions() const { return actions_; }
    // Index of an action; nullopt if unknown.
    std::optional<int> index_of(const std::string& action) const;
    std::string clock_name(int i) const { return "x_" + actions_.at(i); }
    // Resolves a clock name of the form x_<action>.
    std::optional<int> clock_index(const std::string& clock) const;

    bool operator==(const Alphabet& o) const { return actions_ == o.actions_; }

  private:
    std::vector<std::string> actions_;  // sorted, unique
};

// ============================================================================
// Clock valuations
// ============================================================================

class ClockValuation {
  public:
    ClockValuation() = default;
    explicit ClockValuation(int num_clocks) : values_(num_clocks, Rat(0)) {}
    explicit ClockValuation(std::vector<Rat> values) : values_(std::move(values)) {}

    int size() const { return static_cast<int>(values_.size()); }
    const Rat& operator[](int clock) const { return values_.at(clock); }

    // All clocks advanced by delta (delta >= 0, else throws).
    ClockValuation elapsed(const Rat& delta) const;
    // Listed clocks set to 0.
    ClockValuation with_reset(const std::vector<int>& clocks) const;
    ClockValuation with_reset(int clock) const;

    bool operator==(const ClockValuation& o) const { return values_ == o.values_; }
    auto operator<=>(const ClockValuation& o) const = default;
    std::string to_string(const Alphabet& sigma) const;

  private:
    std::vector<Rat> values_;
};

// ============================================================================
// Guards
// ============================================================================
// A guard is a conjunction of per-clock comparisons with nonnegative integer
// constants; no clock-difference atoms.  Stored in a normal form with at most
// one lower and one upper bound per clock.

enum class Rel { Lt, Le, Eq, Ge, Gt };

std::string rel_to_string(Rel r);
std::optional<Rel> rel_from_string(const std::string& s);

struct GuardAtom {
    int clock = 0;
    Rel rel = Rel::Le;
    std::int64_t constant = 0;
    auto operator<=>(const GuardAtom&) const = default;
};

class Guard {
  public:
    // The trivially true guard.
    Guard() = default;

    // Conjunction of atoms; unsatisfiable combinations canonicalize to the
    // explicit empty guard.
    static Guard from_atoms(const std::vector<GuardAtom>& atoms);
    static Guard top() { return Guard(); }
    static Guard bottom();

    bool is_top() const;
    bool is_empty() const { return empty_; }

    Guard conjoined(const Guard& o) const;
    Guard conjoined(const GuardAtom& atom) const;
    // The cells of the complement: a disjoint list of guards covering
    // exactly the valuations outside this guard.
    std::vector<Guard> complement_cells(int num_clocks) const;

    bool contains(const ClockValuation& v) const;
    // Set inclusion of satisfying valuations.
    bool subset_of(const Guard& o) const;
    bool disjoint_with(const Guard& o) const;

    // Largest constant appearing in any bound (0 when trivial).
    std::int64_t max_constant() const;

    // Per-clock bounds; lower is (constant, strict) meaning x > c or x >= c.
    struct Bounds {
        std::int64_t lower = 0;
        bool lower_strict = false;  // x >= 0 by default
        std::optional<std::int64_t> upper;
        bool upper_strict = false;
        auto operator<=>(const Bounds&) const = default;
    };
    // Bounds for a clock (defaults when unconstrained).
    Bounds bounds(int clock) const;
    // Atoms of the normal form, sorted by clock.
    std::vector<GuardAtom> atoms() const;

    bool operator==(const Guard& o) const;
    bool operator<(const Guard& o) const;

    // Rendering like "x_a>1 & x_b<=2"; "true" when trivial.
    std::string to_string(const Alphabet& sigma) const;

  private:
    // clock -> bounds, only for constrained clocks.
    std::map<int, Bounds> bounds_;
    bool empty_ = false;
};

// ============================================================================
// K-equivalence classes
// ============================================================================
// Per-clock classes partitioning [0, infinity) given the bound K:
// the integer points [n] for 0 <= n <= K, the open unit intervals (n, n+1)
// for 0 <= n < K, and the unbounded class of values above K.

struct ClassAtom {
    enum Kind { Point, Open, AboveK } kind = Point;
    std::int64_t n = 0;  // Point(n) or Open(n, n+1); unused for AboveK

    static ClassAtom point(std::int64_t n) { return {Point, n}; }
    static ClassAtom open(std::int64_t n) { return {Open, n}; }
    static ClassAtom above() { return {AboveK, 0}; }

    static ClassAtom of(const Rat& value, std::int64_t k);

    bool contains(const Rat& value, std::int64_t k) const;
    // Whether every value of this class satisfies the comparison with the
    // given integer constant; classes are atomic for such comparisons as
    // long as the constant is <= K.
    bool satisfies(Rel rel, std::int64_t constant, std::int64_t k) const;

    auto operator<=>(const ClassAtom&) const = default;
    std::string to_string() const;
};

class KClass {
  public:
    KClass() = default;
    KClass(std::vector<ClassAtom> per_clock, std::int64_t k)
        : per_clock_(std::move(per_clock)), k_(k) {}

    static KClass of(const ClockValuation& v, std::int64_t k);

    int size() const { return static_cast<int>(per_clock_.size()); }
    std::int64_t k() const { return k_; }
    const ClassAtom& atom(int clock) const { return per_clock_.at(clock); }

    bool contains(const ClockValuation& v) const;
    // Whether the whole class satisfies the guard (atomicity: for constants
    // <= K each class is entirely inside or outside every atom).
    bool satisfies(const Guard& g) const;
    KClass with_reset(int clock) const;

    auto operator<=>(const KClass&) const = default;
    std::string to_string(const Alphabet& sigma) const;

  private:
    std::vector<ClassAtom> per_clock_;
    std::int64_t k_ = 0;
};

// K-equivalence of two values / valuations.
bool k_equivalent(const Rat& x, const Rat& y, std::int64_t k);
bool k_equivalent(const ClockValuation& v, const ClockValuation& w, std::int64_t k);

}  // namespace rerl
