#pragma once

#include <array>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rerl/teacher.hpp"
#include "rerl/words.hpp"
#include "rerl/zone.hpp"

namespace rerl {

// The learner's shared observation state: the answer map, the class-level
// observation graph (one node per K-class path with reset choice, used to
// detect invalid reset hypotheses), and the guard-level decision graph (the
// hypothesis skeleton whose per-step guards get refined over time).
//
// Both graphs are trees of alternating state and decision nodes.  Nodes are
// stored in append-only vectors; guard-tree nodes carry alive flags because
// pruning detaches subtrees.  All iteration orders are deterministic.

class Observations {
  public:
    // Guard-tree decision: a (state, action, guard) choice point with one
    // child per reset alternative.
    struct GDecision {
        int id = 0;
        int parent_state = 0;
        int action = 0;
        Guard guard;
        std::array<int, 2> child = {-1, -1};  // [0]=no reset, [1]=reset
        bool alive = true;
    };

    struct GState {
        int id = 0;
        int parent_decision = -1;  // -1 for the root
        bool parent_reset = false;
        int depth = 0;
        Zone zone;                 // reachable valuations, delay-closed
        std::set<bool> labels;
        std::vector<int> decisions;  // creation order
        bool alive = true;
    };

    // Class-tree decision: a (state, class-at-action, action) choice point.
    // Both reset children always exist; class-tree nodes are never deleted.
    struct CDecision {
        int id = 0;
        int parent_state = 0;
        KClass cls;  // class of the valuation when the action fires
        int action = 0;
        std::array<int, 2> child = {-1, -1};
    };

    struct CState {
        int id = 0;
        int parent_decision = -1;
        bool parent_reset = false;
        int depth = 0;
        KClass cls;  // class after the optional reset
        std::set<bool> labels;
        bool invalid = false;
        std::vector<int> decisions;
        std::vector<TimedWord> words;  // observed words ending here
    };

    Observations(Teacher& teacher, std::int64_t k);

    std::int64_t k() const { return k_; }
    int num_clocks() const { return alphabet().size(); }
    const Alphabet& alphabet() const { return teacher_.alphabet(); }
    Teacher& teacher() { return teacher_; }

    // ------------------------------------------------------------------
    // Observation intake
    // ------------------------------------------------------------------

    // The label of w: answered from the map, or by a membership query whose
    // result is recorded and threaded into the class tree.
    bool request(const TimedWord& w);
    // Record an externally labeled word (an equivalence counterexample)
    // without a membership query.  The word must be new.
    void add_labeled(const TimedWord& w, bool label);
    // Thread an already-recorded word through the guard tree, growing
    // fresh true-guard decisions along unexplored action paths.
    void ingest(const TimedWord& w);
    // Re-thread every recorded word through the guard tree (used after a
    // subtree is rebuilt, to make labels a function of the answer map).
    // Labels are cleared first so that readings refuted since the last
    // replay stop contributing to them.
    void replay_all();
    // Replay only if class invalidations have landed since the last replay,
    // so stale labels never survive into a consistency scan.
    void refresh_if_stale();

    const std::map<TimedWord, bool>& obs() const { return obs_; }

    // ------------------------------------------------------------------
    // Pruning and rebuild scheduling
    // ------------------------------------------------------------------

    // Execute queued prunes: each deletes the guard-tree subtree hanging
    // under one (timed prefix, reset word) path.
    void drain_prunes();
    bool has_pending_prunes() const { return !prune_queue_.empty(); }
    void schedule_rebuild(int gstate);
    // Drop dead/duplicate/subsumed entries; order shallowest-first.
    void normalize_rebuild_queue();
    std::vector<int>& rebuild_queue() { return rebuild_queue_; }
    bool under_scheduled(int gstate) const;  // state or ancestor queued

    // ------------------------------------------------------------------
    // Inconsistencies (guard-tree states carrying both labels)
    // ------------------------------------------------------------------

    std::vector<int> inconsistent_gstates() const;  // (depth, id) order
    // Lexicographically first accepted and rejected words through the state.
    std::pair<TimedWord, TimedWord> witnesses(int gstate) const;

    // ------------------------------------------------------------------
    // Symbolic paths and invalidity
    // ------------------------------------------------------------------

    GuardedWordWithResets gpath(int gstate) const;
    std::vector<bool> cresets(int cstate) const;
    int ancestor_at_depth(int gstate, int depth) const;

    // Whether the guarded word can be driven into a class path whose
    // class-tree node is marked invalid (forward-zone feasible).  A guarded
    // word with a refuted reading is itself refuted: no target consistent
    // with the observations realizes it.
    bool is_invalid_guarded(const GuardedWordWithResets& gw) const;
    std::optional<int> locate(const KClosedWord& kw) const;
    // Whether the class word or one of its prefixes is marked invalid.
    bool kword_invalid(const KClosedWord& kw) const;

    // The label of some timed word satisfying the guarded word: a stored
    // word when one exists, otherwise a synthesized witness (queried).
    bool request_guarded(const GuardedWordWithResets& gw);
    // A timed word satisfying the guarded word, from its timestamp system.
    TimedWord synthesize_witness(const GuardedWordWithResets& gw) const;

    // ------------------------------------------------------------------
    // Structure access
    // ------------------------------------------------------------------

    int groot() const { return 0; }
    int croot() const { return 0; }
    const std::vector<GState>& gstates() const { return gstates_; }
    const std::vector<GDecision>& gdecisions() const { return gdecisions_; }
    const std::vector<CState>& cstates() const { return cstates_; }
    const std::vector<CDecision>& cdecisions() const { return cdecisions_; }

    std::string tdg_dot() const;
    std::string tog_dot() const;

    // ------------------------------------------------------------------
    // Invariant checks (throw std::logic_error on violation)
    // ------------------------------------------------------------------

    void check_tree_shape() const;
    void check_guard_partitions() const;
    void check_zone_correspondence() const;
    void check_class_coverage() const;

    size_t prunes_executed() const { return prunes_executed_; }
    // Invoked after each executed prune (used by soundness test harnesses).
    std::function<void()> after_prune_hook;

  private:
    friend class Refiner;

    Teacher& teacher_;
    std::int64_t k_;
    std::map<TimedWord, bool> obs_;

    std::vector<GState> gstates_;
    std::vector<GDecision> gdecisions_;
    std::vector<CState> cstates_;
    std::vector<CDecision> cdecisions_;

    std::deque<std::pair<TimedWord, std::vector<bool>>> prune_queue_;
    std::vector<int> rebuild_queue_;
    size_t prunes_executed_ = 0;
    // Set when a class state is freshly flagged; cleared by replay_all.
    bool flags_dirty_ = false;

    int new_gstate(int parent_decision, bool parent_reset, int depth, Zone zone);
    int new_gdecision(int parent_state, int action, Guard guard);
    int new_cstate(int parent_decision, bool parent_reset, int depth, KClass cls);
    int new_cdecision(int parent_state, KClass cls, int action);

    void findpath_class(int sid, const ClockValuation& v, const TimedWord& w,
                        size_t pos, bool label);
    int addword_class(int sid, const KClass& cls, int action, const TimedWord& prefix);
    void mark_invalid(int sid, const TimedWord& word);

    void findpath_guard(int sid, int cid, const ClockValuation& v,
                        const TimedWord& w, size_t pos, bool label);
    int addword_guard(int sid, int action);

    void execute_prune(const TimedWord& prefix, const std::vector<bool>& resets);
    void kill_gstate(int sid);

    bool invalid_dfs(int cid, const GuardedWordWithResets& gw, size_t depth) const;
    std::optional<TimedWord> stored_dive(int cid, const GuardedWordWithResets& gw,
                                         size_t depth) const;
    // All K-classes intersecting the guard (used by the partition check).
    std::vector<KClass> classes_within(const Guard& cell) const;
};

}  // namespace rerl
