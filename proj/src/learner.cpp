#include "rerl/learner.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>

namespace rerl {

namespace {

std::vector<bool> resets_of(const GuardedWordWithResets& gw) {
    std::vector<bool> r;
    r.reserve(gw.size());
    for (const auto& letter : gw) r.push_back(letter.reset);
    return r;
}

}  // namespace

Learner::Learner(Teacher& teacher, std::int64_t k, LearnLimits limits)
    : teacher_(teacher), limits_(limits), obs_(teacher, k), refiner_(obs_) {}

LearnStats Learner::stats() const {
    LearnStats s;
    s.membership_queries = obs_.obs().size();
    s.equivalence_queries = equivalence_count_;
    s.rebuilds = rebuilds_;
    s.prunes = obs_.prunes_executed();
    return s;
}

void Learner::quiesce() {
    for (size_t round = 0;; ++round) {
        if (round > 100000) throw std::logic_error("quiesce did not converge");
        obs_.drain_prunes();
        // Wipe labels deposited along readings that have since been refuted,
        // so the consistency scan below only sees live conflicts.
        obs_.refresh_if_stale();
        if (obs_.has_pending_prunes()) continue;
        obs_.normalize_rebuild_queue();
        auto& queue = obs_.rebuild_queue();
        if (!queue.empty()) {
            int sid = queue.front();
            queue.erase(queue.begin());
            try {
                refiner_.rebuild(sid);
                ++rebuilds_;
            } catch (const ParentInvalidated&) {
                obs_.drain_prunes();
                if (obs_.gstates()[sid].alive) obs_.schedule_rebuild(sid);
            } catch (const AncestorSplit& e) {
                // A validity split landed above the state being rebuilt;
                // redo the tree from the fenced ancestor instead.
                obs_.drain_prunes();
                int target = e.depth < obs_.gstates()[sid].depth
                                 ? obs_.ancestor_at_depth(sid, e.depth)
                                 : sid;
                if (obs_.gstates()[target].alive) obs_.schedule_rebuild(target);
            }
            continue;
        }
        auto inconsistent = obs_.inconsistent_gstates();
        if (inconsistent.empty()) break;
        int sid = inconsistent.front();
        auto [accepted, rejected] = obs_.witnesses(sid);
        auto pair =
            refiner_.adjpair(accepted, rejected, resets_of(obs_.gpath(sid)));
        auto quads =
            Refiner::consistency_guards(pair, obs_.num_clocks(), obs_.k());
        if (quads.empty()) {
            // The pair collapsed onto one class word with both labels; the
            // class tree has flagged it and queued prunes that dissolve this
            // state, so there is nothing to split here.
            if (!obs_.has_pending_prunes())
                throw std::logic_error("empty consistency guards without prunes");
            continue;
        }
        refiner_.add_pair(pair);
        size_t cut = quads.front().index;
        for (const auto& q : quads) cut = std::min(cut, q.index);
        obs_.schedule_rebuild(obs_.ancestor_at_depth(sid, static_cast<int>(cut)));
    }
}

std::vector<ResetStrategy> Learner::admissible_strategies() const {
    const auto& states = obs_.gstates();
    const auto& decisions = obs_.gdecisions();

    std::map<int, int> forced;
    std::vector<int> free_ids;      // both children alive, creation order
    std::map<int, int> preferred;   // free decision -> preferred child
    std::map<int, int> alternate;
    for (const auto& d : decisions) {
        if (!d.alive || !states[d.parent_state].alive) continue;
        int child_false = d.child[0];
        int child_true = d.child[1];
        bool has_false = child_false >= 0 && states[child_false].alive;
        bool has_true = child_true >= 0 && states[child_true].alive;
        if (has_false && has_true) {
            const auto& parent_labels = states[d.parent_state].labels;
            bool true_match = states[child_true].labels == parent_labels;
            bool false_match = states[child_false].labels == parent_labels;
            // Same-label children fold best; on a tie keep the resetting side.
            if (false_match && !true_match) {
                preferred[d.id] = child_false;
                alternate[d.id] = child_true;
            } else {
                preferred[d.id] = child_true;
                alternate[d.id] = child_false;
            }
            free_ids.push_back(d.id);
        } else if (has_false || has_true) {
            forced[d.id] = has_true ? child_true : child_false;
        } else {
            throw std::logic_error("alive decision without alive children");
        }
    }

    size_t total = limits_.max_strategies;
    if (free_ids.size() < 20)
        total = std::min(total, static_cast<size_t>(1) << free_ids.size());
    std::vector<ResetStrategy> out;
    out.reserve(total);
    for (size_t counter = 0; counter < total; ++counter) {
        ResetStrategy strategy;
        strategy.choice = forced;
        for (size_t j = 0; j < free_ids.size(); ++j) {
            bool flip = j < 8 * sizeof(size_t) && ((counter >> j) & 1);
            int did = free_ids[j];
            strategy.choice[did] = flip ? alternate[did] : preferred[did];
        }
        out.push_back(std::move(strategy));
    }
    return out;
}

int Learner::height(const ResetStrategy& strategy, int gstate) const {
    const auto& states = obs_.gstates();
    const auto& decisions = obs_.gdecisions();
    int best = 0;
    for (int did : states[gstate].decisions) {
        if (!decisions[did].alive) continue;
        auto it = strategy.choice.find(did);
        if (it == strategy.choice.end())
            throw std::logic_error("strategy misses an alive decision");
        best = std::max(best, 1 + height(strategy, it->second));
    }
    return best;
}

bool Learner::compat(const ResetStrategy& strategy, int a, int b) const {
    // Asymmetric subsumption: folding a onto b replaces a's outgoing
    // structure with b's, so b must cover every alive decision of a (same
    // action, overlapping cell) with recursively compatible successors, and
    // carry at least a's labels.  Otherwise the fold would drop recorded
    // behavior and the candidate could contradict an observation.
    const auto& states = obs_.gstates();
    const auto& decisions = obs_.gdecisions();
    const auto& la = states[a].labels;
    const auto& lb = states[b].labels;
    if (!std::includes(lb.begin(), lb.end(), la.begin(), la.end())) return false;
    for (int da : states[a].decisions) {
        if (!decisions[da].alive) continue;
        bool covered = false;
        for (int db : states[b].decisions) {
            if (!decisions[db].alive) continue;
            if (decisions[da].action != decisions[db].action) continue;
            if (decisions[da].guard.conjoined(decisions[db].guard).is_empty()) continue;
            covered = true;
            if (!compat(strategy, strategy.choice.at(da), strategy.choice.at(db)))
                return false;
        }
        if (!covered) return false;
    }
    return true;
}

bool Learner::preorder_leq(const ResetStrategy& strategy, int a, int b) const {
    return height(strategy, a) <= height(strategy, b) && compat(strategy, a, b);
}

std::vector<int> Learner::select_u(const ResetStrategy& strategy) const {
    const auto& states = obs_.gstates();
    const auto& decisions = obs_.gdecisions();
    std::vector<int> u = {obs_.groot()};
    for (size_t next = 0; next < u.size(); ++next) {
        int sid = u[next];
        for (int did : states[sid].decisions) {
            if (!decisions[did].alive) continue;
            int child = strategy.choice.at(did);
            bool folded = false;
            for (int member : u) {
                if (preorder_leq(strategy, child, member)) {
                    folded = true;
                    break;
                }
            }
            if (!folded) u.push_back(child);
        }
    }
    return u;
}

Rera Learner::build(const ResetStrategy& strategy, const std::vector<int>& u,
                    bool identity) const {
    const auto& states = obs_.gstates();
    const auto& decisions = obs_.gdecisions();
    std::map<int, int> index_of;
    Rera h;
    h.alphabet = obs_.alphabet();
    h.max_constant = obs_.k();
    h.initial = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        index_of[u[i]] = static_cast<int>(i);
        h.location_names.push_back("q" + std::to_string(i));
        h.accepting.push_back(states[u[i]].labels == std::set<bool>{true});
    }
    for (size_t i = 0; i < u.size(); ++i) {
        for (int did : states[u[i]].decisions) {
            if (!decisions[did].alive) continue;
            int child = strategy.choice.at(did);
            int target = -1;
            if (identity) {
                target = index_of.at(child);
            } else {
                // Fold onto the lowest member above the child; ties by id.
                int best_height = std::numeric_limits<int>::max();
                for (int member : u) {
                    if (!preorder_leq(strategy, child, member)) continue;
                    int mh = height(strategy, member);
                    if (mh < best_height) {
                        best_height = mh;
                        target = index_of.at(member);
                    }
                }
                if (target < 0)
                    throw std::logic_error("folding set is not closed");
            }
            Transition t;
            t.source = static_cast<int>(i);
            t.action = decisions[did].action;
            t.guard = decisions[did].guard;
            t.reset = states[child].parent_reset;
            t.target = target;
            h.transitions.push_back(std::move(t));
        }
    }
    h.validate();
    return h;
}

Rera Learner::merge(const ResetStrategy& strategy,
                    const std::vector<int>& u) const {
    return build(strategy, u, false);
}

Rera Learner::identity_hypothesis(const ResetStrategy& strategy) const {
    const auto& states = obs_.gstates();
    const auto& decisions = obs_.gdecisions();
    std::vector<int> reachable = {obs_.groot()};
    for (size_t next = 0; next < reachable.size(); ++next) {
        for (int did : states[reachable[next]].decisions) {
            if (!decisions[did].alive) continue;
            reachable.push_back(strategy.choice.at(did));
        }
    }
    return build(strategy, reachable, true);
}

bool Learner::replay_consistent(const Rera& hypothesis) const {
    for (const auto& [word, label] : obs_.obs())
        if (hypothesis.member(word) != label) return false;
    return true;
}

LearnResult Learner::learn() {
    obs_.request({});
    obs_.ingest({});

    Rera best;
    bool have_best = false;
    LearnStats final_stats;

    for (size_t iter = 0;; ++iter) {
        quiesce();
        if (on_iteration) on_iteration(iter);
        final_stats = stats();
        final_stats.iterations = iter + 1;

        auto strategies = admissible_strategies();
        if (strategies.empty()) {
            final_stats.strategies_always_nonempty = false;
            throw std::logic_error("no admissible reset strategy");
        }

        if (iter >= limits_.max_iterations ||
            obs_.obs().size() >= limits_.max_queries) {
            if (!have_best) best = identity_hypothesis(strategies.front());
            return {false, best, final_stats};
        }

        // Submit every distinct fold that agrees with the observations: a
        // single wrong-reset fold can stay self-consistent forever, so its
        // counterexamples must not starve the alternative strategies.  The
        // tree is left untouched until all queries of the round are in.
        std::vector<std::pair<TimedWord, bool>> gained;
        auto keep = [&](const EquivCounterexample& cex) {
            if (obs_.obs().count(cex.word))
                throw std::logic_error("counterexample is already recorded");
            for (const auto& [w, label] : gained) {
                if (w == cex.word) return;
            }
            gained.push_back({cex.word, cex.accepted_by_first});
        };
        std::set<std::string> seen;
        std::vector<Rera> candidates;
        for (const auto& strategy : strategies) {
            Rera h = merge(strategy, select_u(strategy));
            if (!seen.insert(serialize_rera(h)).second) continue;
            if (!replay_consistent(h)) continue;
            candidates.push_back(std::move(h));
        }
        // Smallest first: the most general guess either ends the run or
        // yields a counterexample that cheaply refutes its refinements.
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Rera& x, const Rera& y) {
                             return x.num_locations() < y.num_locations();
                         });
        bool submitted = false;
        for (const Rera& h : candidates) {
            bool refuted = false;
            for (const auto& [w, label] : gained) {
                if (h.member(w) != label) {
                    refuted = true;
                    break;
                }
            }
            if (refuted) continue;
            best = h;
            have_best = true;
            submitted = true;
            ++equivalence_count_;
            auto cex = teacher_.equivalence(h);
            if (!cex) {
                final_stats = stats();
                final_stats.iterations = iter + 1;
                return {true, h, final_stats};
            }
            keep(*cex);
        }
        if (!submitted) {
            // Every folded candidate disagreed with some observation; the
            // unfolded tree itself never does.
            Rera h = identity_hypothesis(strategies.front());
            if (!replay_consistent(h))
                throw std::logic_error("unfolded hypothesis contradicts observations");
            best = h;
            have_best = true;
            ++equivalence_count_;
            auto cex = teacher_.equivalence(h);
            if (!cex) {
                final_stats = stats();
                final_stats.iterations = iter + 1;
                return {true, h, final_stats};
            }
            keep(*cex);
        }

        for (const auto& [w, label] : gained) {
            // An earlier ingest of this round may have recorded the word
            // already through its prefix queries.
            if (obs_.obs().count(w)) continue;
            obs_.add_labeled(w, label);
            obs_.ingest(w);
        }
    }
}

}  // namespace rerl
