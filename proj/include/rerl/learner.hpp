#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "rerl/observation.hpp"
#include "rerl/refinement.hpp"
#include "rerl/rera.hpp"
#include "rerl/teacher.hpp"

namespace rerl {

struct LearnLimits {
    size_t max_queries = 5000;     // bound on recorded observations
    size_t max_iterations = 200;   // outer-loop rounds
    size_t max_strategies = 64;    // candidates per round
};

struct LearnStats {
    size_t iterations = 0;
    size_t membership_queries = 0;  // recorded observations (distinct words)
    size_t equivalence_queries = 0;
    size_t rebuilds = 0;
    size_t prunes = 0;
    bool strategies_always_nonempty = true;
};

struct LearnResult {
    bool success = false;  // false on limit exhaustion
    Rera hypothesis;
    LearnStats stats;
};

// One reset decision per guard-tree decision node: the chosen child state.
struct ResetStrategy {
    std::map<int, int> choice;
};

// The outer learning loop: keeps the observation structures quiescent
// (prunes drained, rebuilds done, inconsistencies resolved), then folds the
// guard tree into candidate automata and drives them through equivalence
// queries until the teacher accepts one or a limit is hit.
class Learner {
  public:
    Learner(Teacher& teacher, std::int64_t k, LearnLimits limits = {});

    LearnResult learn();

    Observations& observations() { return obs_; }
    Refiner& refiner() { return refiner_; }

    // Drain prunes, run scheduled rebuilds shallowest-first, and resolve
    // label inconsistencies via adjacent pairs until nothing is pending.
    void quiesce();

    // Admissible reset strategies, preferred choices first, capped at
    // limits.max_strategies.  Never empty.
    std::vector<ResetStrategy> admissible_strategies() const;

    int height(const ResetStrategy& strategy, int gstate) const;
    // Folding preorder: height-dominated, same labels, and equal labels
    // along every guarded suffix present under both states.
    bool preorder_leq(const ResetStrategy& strategy, int a, int b) const;
    // Prefix-closed folding set: top-down greedy, successors kept unless
    // an existing member sits above them in the preorder.
    std::vector<int> select_u(const ResetStrategy& strategy) const;
    // The automaton over the folding set: one transition per kept decision,
    // targeting the lowest (height, then id) member above the child.
    Rera merge(const ResetStrategy& strategy, const std::vector<int>& u) const;
    // Fold-free automaton with one location per reachable state.
    Rera identity_hypothesis(const ResetStrategy& strategy) const;

    bool replay_consistent(const Rera& hypothesis) const;

    // Invoked once per outer iteration after quiescing (for snapshots).
    std::function<void(size_t)> on_iteration;

  private:
    Teacher& teacher_;
    LearnLimits limits_;
    Observations obs_;
    Refiner refiner_;
    size_t rebuilds_ = 0;
    size_t equivalence_count_ = 0;

    bool compat(const ResetStrategy& strategy, int a, int b) const;
    Rera build(const ResetStrategy& strategy, const std::vector<int>& u,
               bool identity) const;
    LearnStats stats() const;
};

}  // namespace rerl
