#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rerl/observation.hpp"
#include "rerl/words.hpp"

namespace rerl {

// A difference between two adjacent words: at letter `index` the first
// word's clock value sits on the integer `constant` while the second lies
// strictly off it in the stated direction (Ge when below, Le when above).
struct DiffQuad {
    size_t index = 0;
    int clock = 0;
    std::int64_t constant = 0;
    Rel rel = Rel::Le;  // Le or Ge

    auto operator<=>(const DiffQuad&) const = default;
};

// Two words with equal action/reset projections whose clock values agree up
// to distance < 1 at integer positions and up to K-equivalence elsewhere,
// carrying opposite labels.  The first word anchors the integer values.
struct AdjacentPair {
    TimedWordWithResets first;
    TimedWordWithResets second;
    bool first_accepted = true;
};

// Border relation between two touching K-class atoms: strict, non-strict,
// or undetermined (both could fit; materialized as non-strict).
enum class BorderRel { Lt, Le, Top };

std::string border_rel_to_string(BorderRel r);

struct CommonBorder {
    int clock = 0;
    BorderRel rel = BorderRel::Le;
    std::int64_t constant = 0;

    auto operator<=>(const CommonBorder&) const = default;
};

// A stored split separating two causes of invalidity below a guard-tree
// state: inside `guard`, classes on one side of the border atom admit one
// reset choice, classes on the other side the opposite one.  Reuse matches
// by (depth, action, guard) rather than state id: rebuilds replace state
// ids, but the split stays valid for any cell at the same position.
struct ValidityGuard {
    int gstate = 0;  // where the split was derived (provenance)
    int depth = 0;
    int action = 0;
    Guard guard;
    int clock = 0;
    BorderRel rel = BorderRel::Le;
    std::int64_t constant = 0;
};

// Raised when refinement queries invalidate the very state being refined;
// the caller must drain prunes and restart from a surviving ancestor.
struct ParentInvalidated : std::runtime_error {
    explicit ParentInvalidated(const std::string& what) : std::runtime_error(what) {}
};

// Raised when two invalidity witnesses collapse onto one class: the same
// class is refuted under both resets via prefix readings that diverge at
// an earlier letter, so no border at the current depth separates them.
// The divergence cell has been fenced in the validity ledger; the caller
// must rebuild from the state at `depth` so the fence takes effect.
struct AncestorSplit : std::runtime_error {
    int depth;
    explicit AncestorSplit(int d)
        : std::runtime_error("invalidity witnesses diverge at depth " +
                             std::to_string(d)),
          depth(d) {}
};

// Guard inference over an observation structure: adjacency-driven
// consistency splits, invalidity-driven validity splits, and subtree
// reconstruction.  Keeps the ledgers (adjacent pairs, validity guards,
// applied atoms) that make every inferred guard atom traceable.
class Refiner {
  public:
    explicit Refiner(Observations& obs) : obs_(obs) {}

    // ------------------------------------------------------------------
    // Adjacency
    // ------------------------------------------------------------------

    // Words must share actions and resets (else std::invalid_argument).
    static bool is_adjacent(const TimedWordWithResets& w1, const TimedWordWithResets& w2,
                            int num_clocks, std::int64_t k);
    // Defined only on adjacent pairs (std::logic_error otherwise).
    static std::vector<DiffQuad> diff(const TimedWordWithResets& first,
                                      const TimedWordWithResets& second,
                                      int num_clocks, std::int64_t k);
    // Per clock, the minimal quadruple under (index, then constant).
    static std::vector<DiffQuad> consistency_guards(const AdjacentPair& pair,
                                                    int num_clocks, std::int64_t k);
    // Borders shared by the two classes, one per clock where their atoms
    // touch; empty when no clock has touching atoms.
    static std::vector<CommonBorder> common_borders(const KClass& z1, const KClass& z2);

    // From an accepted and a rejected word with the same actions (labels
    // already recorded), narrows them into an adjacent pair via halving
    // and integer-forcing combinations, each intermediate word queried.
    AdjacentPair adjpair(const TimedWord& accepted, const TimedWord& rejected,
                         const std::vector<bool>& resets);

    // ------------------------------------------------------------------
    // Guard inference
    // ------------------------------------------------------------------

    // Separates the reset=true invalidity witnesses W1 from the reset=false
    // witnesses W2 below gstate's cell (guard, action): queries spliced
    // midpoints (integer delay changes only) until the two witness classes
    // share a border, then stores and returns the validity guard.  When the
    // witnesses collapse onto one class, the refutations stem from prefix
    // readings that diverge earlier; the divergence cell is fenced in the
    // ledger and AncestorSplit is thrown.
    ValidityGuard invalguard(const std::vector<std::pair<KClass, TimedWord>>& w1,
                             const std::vector<std::pair<KClass, TimedWord>>& w2,
                             int gstate, int action, const Guard& guard);

    // Partition of g at (gstate, action): recursively split by consistency
    // guards of passing pairs at the state's depth, then by validity guards
    // where both reset options are invalid.
    std::vector<Guard> findguard(int gstate, int action, const Guard& g);

    // Rebuilds the subtree under the state from the recorded observations
    // (fresh partitions per findguard, labels per request_guarded), then
    // re-threads every observation.  Throws ParentInvalidated when queries
    // issued along the way invalidate the state being rebuilt.
    void rebuild(int gstate);

    // ------------------------------------------------------------------
    // Ledgers
    // ------------------------------------------------------------------

    const std::vector<AdjacentPair>& pairs() const { return pairs_; }
    void add_pair(AdjacentPair pair);
    const std::vector<ValidityGuard>& validity_guards() const { return validity_ledger_; }

    // Every atom of every alive guard-tree decision guard must trace to an
    // applied split atom (same state, action, clock, constant); throws
    // std::logic_error otherwise.
    void check_well_guarded() const;

    // One line per refinement query: word, label, phase.
    void set_trace(std::ostream* os) { trace_ = os; }

  private:
    Observations& obs_;
    std::vector<AdjacentPair> pairs_;
    std::vector<ValidityGuard> validity_ledger_;
    // Borders that keep refuted prefix readings in separate branches.
    // Unlike validity guards, these apply to any cell they properly split,
    // not only cells refuted under both resets: the collapse they resolve
    // sits below a cell that still has a surviving reset of its own.
    std::vector<ValidityGuard> fence_ledger_;
    struct AppliedAtom {
        int gstate = 0;
        int action = 0;
        GuardAtom atom;
    };
    std::vector<AppliedAtom> applied_atoms_;
    std::ostream* trace_ = nullptr;

    bool query(const TimedWord& w, const char* phase);
    void rebuild_rec(int gstate);
    // Witnesses of flagged invalidity below (gpath(gstate), guard, action,
    // reset): pairs of the decision-point class and a stored word.
    std::vector<std::pair<KClass, TimedWord>> collect_invalid(int gstate, int action,
                                                              const Guard& guard,
                                                              bool reset) const;
    bool pair_passes(const AdjacentPair& pair, const GuardedWordWithResets& path,
                     int action, const Guard& g) const;
};

}  // namespace rerl
