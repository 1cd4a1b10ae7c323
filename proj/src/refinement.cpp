#include "rerl/refinement.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

namespace rerl {

namespace {

TimedWord prefix_of(const TimedWord& w, size_t n) {
    return TimedWord(w.begin(), w.begin() + n);
}

std::vector<bool> resets_of(const GuardedWordWithResets& path) {
    std::vector<bool> r;
    for (const auto& l : path) r.push_back(l.reset);
    return r;
}

void require_same_shape(const TimedWordWithResets& w1, const TimedWordWithResets& w2) {
    if (w1.size() != w2.size()) {
        throw std::invalid_argument("adjacency: length mismatch");
    }
    for (size_t i = 0; i < w1.size(); ++i) {
        if (w1[i].action != w2[i].action || w1[i].reset != w2[i].reset) {
            throw std::invalid_argument("adjacency: projection or reset mismatch");
        }
    }
}

// Position of a class atom in value order: [0] < (0,1) < [1] < ... < [K] < above.
std::int64_t atom_rank(const ClassAtom& a, std::int64_t k) {
    switch (a.kind) {
        case ClassAtom::Point: return 2 * a.n;
        case ClassAtom::Open: return 2 * a.n + 1;
        case ClassAtom::AboveK: return 2 * k + 1;
    }
    return 0;
}

GuardAtom negate_atom(const GuardAtom& a) {
    switch (a.rel) {
        case Rel::Lt: return {a.clock, Rel::Ge, a.constant};
        case Rel::Le: return {a.clock, Rel::Gt, a.constant};
        case Rel::Ge: return {a.clock, Rel::Lt, a.constant};
        case Rel::Gt: return {a.clock, Rel::Le, a.constant};
        case Rel::Eq: break;
    }
    throw std::logic_error("refinement: cannot negate equality atom");
}

GuardAtom materialize_border(int clock, BorderRel rel, std::int64_t constant) {
    // Undetermined borders get the non-strict form; a wrong orientation is
    // corrected by later counterexamples.
    return {clock, rel == BorderRel::Lt ? Rel::Lt : Rel::Le, constant};
}

// Lexicographically smallest witness, shorter words first.
bool witness_less(const std::pair<KClass, TimedWord>& a,
                  const std::pair<KClass, TimedWord>& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
    return a.second < b.second;
}

}  // namespace

std::string border_rel_to_string(BorderRel r) {
    switch (r) {
        case BorderRel::Lt: return "<";
        case BorderRel::Le: return "<=";
        case BorderRel::Top: return "top";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Adjacency
// ---------------------------------------------------------------------------

bool Refiner::is_adjacent(const TimedWordWithResets& w1, const TimedWordWithResets& w2,
                          int num_clocks, std::int64_t k) {
    require_same_shape(w1, w2);
    auto r1 = run_of(w1, num_clocks);
    auto r2 = run_of(w2, num_clocks);
    for (size_t i = 0; i < w1.size(); ++i) {
        for (int x = 0; x < num_clocks; ++x) {
            const Rat& a = r1[i].at_action[x];
            const Rat& b = r2[i].at_action[x];
            if (is_integer(a)) {
                // Integer values beyond the bound are indistinguishable from
                // any other value beyond it.
                if (a > k ? !(b > k) : abs(a - b) >= 1) return false;
            } else if (!k_equivalent(a, b, k)) {
                return false;
            }
        }
    }
    return true;
}

std::vector<DiffQuad> Refiner::diff(const TimedWordWithResets& first,
                                    const TimedWordWithResets& second,
                                    int num_clocks, std::int64_t k) {
    if (!is_adjacent(first, second, num_clocks, k)) {
        throw std::logic_error("diff: words are not adjacent");
    }
    auto r1 = run_of(first, num_clocks);
    auto r2 = run_of(second, num_clocks);
    std::vector<DiffQuad> out;
    for (size_t i = 0; i < first.size(); ++i) {
        for (int x = 0; x < num_clocks; ++x) {
            const Rat& a = r1[i].at_action[x];
            const Rat& b = r2[i].at_action[x];
            if (!is_integer(a) || a > k || a == b) continue;
            out.push_back({i, x, static_cast<std::int64_t>(floor_rat(a)),
                           b < a ? Rel::Ge : Rel::Le});
        }
    }
    return out;
}

std::vector<DiffQuad> Refiner::consistency_guards(const AdjacentPair& pair,
                                                  int num_clocks, std::int64_t k) {
    auto quads = diff(pair.first, pair.second, num_clocks, k);
    std::map<int, DiffQuad> best;
    for (const DiffQuad& q : quads) {
        auto it = best.find(q.clock);
        if (it == best.end() || std::tie(q.index, q.constant) <
                                    std::tie(it->second.index, it->second.constant)) {
            best[q.clock] = q;
        }
    }
    std::vector<DiffQuad> out;
    for (const auto& [clock, q] : best) out.push_back(q);
    return out;
}

std::vector<CommonBorder> Refiner::common_borders(const KClass& z1, const KClass& z2) {
    if (z1.size() != z2.size() || z1.k() != z2.k()) {
        throw std::invalid_argument("common_borders: clock sets differ");
    }
    std::int64_t k = z1.k();
    std::vector<CommonBorder> out;
    for (int x = 0; x < z1.size(); ++x) {
        std::int64_t lo = atom_rank(z1.atom(x), k);
        std::int64_t hi = atom_rank(z2.atom(x), k);
        if (lo == hi) continue;
        if (lo > hi) std::swap(lo, hi);
        if (hi - lo == 1) {
            if (lo % 2 == 0) {
                out.push_back({x, BorderRel::Le, lo / 2});  // [n] touching (n,n+1)
            } else {
                out.push_back({x, BorderRel::Lt, (lo + 1) / 2});  // (n-1,n) touching [n]
            }
        } else if (hi - lo == 2 && lo % 2 == 1) {
            out.push_back({x, BorderRel::Top, (lo + 1) / 2});  // opens around [n]
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// adjpair
// ---------------------------------------------------------------------------

bool Refiner::query(const TimedWord& w, const char* phase) {
    bool label = obs_.request(w);
    if (trace_) {
        *trace_ << format_timed_word(w, obs_.alphabet()) << '\t'
                << (label ? "accept" : "reject") << '\t' << phase << '\n';
    }
    return label;
}

AdjacentPair Refiner::adjpair(const TimedWord& accepted, const TimedWord& rejected,
                              const std::vector<bool>& resets) {
    const int n_clocks = obs_.num_clocks();
    const std::int64_t k = obs_.k();
    if (obs_.request(accepted) != true || obs_.request(rejected) != false) {
        throw std::invalid_argument("adjpair: labels do not match the arguments");
    }
    TimedWord wa = accepted;
    TimedWord wr = rejected;
    auto vals = [&](const TimedWord& w) { return run_of(with_resets(w, resets), n_clocks); };

    // Halve the gap everywhere until all clock values agree within 1 (or
    // both sit beyond the bound).
    for (int rounds = 0;; ++rounds) {
        if (rounds > 512) throw std::logic_error("adjpair: halving diverged");
        auto ra = vals(wa);
        auto rr = vals(wr);
        bool wide = false;
        for (size_t i = 0; i < wa.size() && !wide; ++i) {
            for (int x = 0; x < n_clocks && !wide; ++x) {
                const Rat& a = ra[i].at_action[x];
                const Rat& b = rr[i].at_action[x];
                if (abs(a - b) >= 1 && !(a > k && b > k)) wide = true;
            }
        }
        if (!wide) break;
        TimedWord mid = lambda_sum(Rat(1, 2), wa, wr);
        (query(mid, "half") ? wa : wr) = mid;
    }

    // Drive every off-by-one fractional pair onto the integer between them.
    const size_t force_cap = 4 * wa.size() * static_cast<size_t>(n_clocks) + 8;
    for (size_t rounds = 0;; ++rounds) {
        if (rounds > force_cap) throw std::logic_error("adjpair: forcing diverged");
        auto ra = vals(wa);
        auto rr = vals(wr);
        std::optional<Rat> lambda;
        for (size_t i = 0; i < wa.size() && !lambda; ++i) {
            for (int x = 0; x < n_clocks && !lambda; ++x) {
                const Rat& a = ra[i].at_action[x];
                const Rat& b = rr[i].at_action[x];
                if (is_integer(a) || is_integer(b)) continue;
                if (floor_rat(a) == floor_rat(b) || (a > k && b > k)) continue;
                lambda = a < b ? (Rat(floor_rat(b)) - a) / (b - a)
                               : (a - Rat(floor_rat(a))) / (a - b);
            }
        }
        if (!lambda) break;
        TimedWord mid = lambda_sum(*lambda, wr, wa);
        (query(mid, "force") ? wa : wr) = mid;
    }

    // The mean revisits the boundary; whichever side it lands on, the other
    // original plus the mean form the output pair.
    TimedWord mean = lambda_sum(Rat(1, 2), wa, wr);
    bool mean_accepted = query(mean, "mean");
    AdjacentPair pair;
    pair.first = with_resets(mean_accepted ? wr : wa, resets);
    pair.second = with_resets(mean, resets);
    pair.first_accepted = !mean_accepted;
    if (!is_adjacent(pair.first, pair.second, n_clocks, k)) {
        throw std::logic_error("adjpair: result is not adjacent");
    }
    return pair;
}

void Refiner::add_pair(AdjacentPair pair) {
    if (!is_adjacent(pair.first, pair.second, obs_.num_clocks(), obs_.k())) {
        throw std::logic_error("pair ledger: not adjacent");
    }
    pairs_.push_back(std::move(pair));
}

// ---------------------------------------------------------------------------
// invalguard
// ---------------------------------------------------------------------------

ValidityGuard Refiner::invalguard(const std::vector<std::pair<KClass, TimedWord>>& w1,
                                  const std::vector<std::pair<KClass, TimedWord>>& w2,
                                  int gstate, int action, const Guard& guard) {
    if (w1.empty() || w2.empty()) {
        throw std::logic_error("invalguard: missing invalidity witnesses");
    }
    const int n_clocks = obs_.num_clocks();
    const std::int64_t k = obs_.k();
    GuardedWordWithResets path = obs_.gpath(gstate);
    const size_t n = path.size();
    std::vector<bool> pre = resets_of(path);

    auto class_at = [&](const TimedWord& w) {
        std::vector<bool> r = pre;
        r.push_back(false);  // the decision-point value precedes its reset
        auto run = run_of(with_resets(prefix_of(w, n + 1), r), n_clocks);
        return KClass::of(run[n].at_action, k);
    };
    auto branch_invalid = [&](const TimedWord& w, bool reset) {
        std::vector<bool> r = pre;
        r.push_back(reset);
        return obs_.kword_invalid(
            k_closed_word_of(with_resets(prefix_of(w, n + 1), r), n_clocks, k));
    };
    auto store = [&](int clock, BorderRel rel, std::int64_t constant) {
        ValidityGuard vg{gstate, static_cast<int>(n), action, guard, clock, rel, constant};
        validity_ledger_.push_back(vg);
        return vg;
    };
    // Cut between two distinct classes at the lower class's upper boundary
    // on the first differing clock.
    auto boundary_cut = [&](const KClass& za, const KClass& zb)
        -> std::tuple<int, BorderRel, std::int64_t> {
        for (int x = 0; x < n_clocks; ++x) {
            if (za.atom(x) == zb.atom(x)) continue;
            const ClassAtom& lo = atom_rank(za.atom(x), k) < atom_rank(zb.atom(x), k)
                                      ? za.atom(x)
                                      : zb.atom(x);
            if (lo.kind == ClassAtom::Point) return {x, BorderRel::Le, lo.n};
            return {x, BorderRel::Lt, lo.n + 1};
        }
        throw std::logic_error("invalguard: identical witness classes");
    };
    auto synthesized = [&](const KClass& za, const KClass& zb) {
        // No further integer movement is possible; cut between the classes.
        auto [x, rel, c] = boundary_cut(za, zb);
        return store(x, rel, c);
    };
    // The same class is refuted under both resets, so the two refutations
    // come from prefix readings that diverge at an earlier letter (had they
    // shared the reading, the conflict would have propagated to the prefix
    // and invalidated this state already).  Fence the divergence cell so
    // the readings end up in separate branches, and restart from there.
    auto diverge = [&](const TimedWord& wa, const TimedWord& wb) -> AncestorSplit {
        auto run_a = run_of(with_resets(prefix_of(wa, n), pre), n_clocks);
        auto run_b = run_of(with_resets(prefix_of(wb, n), pre), n_clocks);
        for (size_t i = 0; i < n; ++i) {
            KClass ca = KClass::of(run_a[i].at_action, k);
            KClass cb = KClass::of(run_b[i].at_action, k);
            if (ca == cb) continue;
            auto [x, rel, c] = boundary_cut(ca, cb);
            int anc = obs_.ancestor_at_depth(gstate, static_cast<int>(i));
            fence_ledger_.push_back({anc, static_cast<int>(i), path[i].action,
                                     path[i].guard, x, rel, c});
            return AncestorSplit(static_cast<int>(i));
        }
        throw ParentInvalidated("invalguard: collapsed witnesses share their reading");
    };

    KClass z1 = w1.front().first;
    TimedWord word1 = w1.front().second;
    for (const auto& e : w1) {
        if (witness_less(e, {z1, word1})) std::tie(z1, word1) = e;
    }
    KClass z2 = w2.front().first;
    TimedWord word2 = w2.front().second;
    for (const auto& e : w2) {
        if (witness_less(e, {z2, word2})) std::tie(z2, word2) = e;
    }

    for (int round = 0; round < 64; ++round) {
        if (obs_.is_invalid_guarded(path)) {
            throw ParentInvalidated("invalguard: refined state became invalid");
        }
        if (z1 == z2) throw diverge(word1, word2);
        auto borders = common_borders(z1, z2);
        if (!borders.empty()) {
            const CommonBorder& b = borders.front();
            return store(b.clock, b.rel, b.constant);
        }
        TimedWord mid = lambda_sum(Rat(1, 2), prefix_of(word1, n + 1), prefix_of(word2, n + 1));
        TimedWord s1 = splice(mid, word1);
        TimedWord s2 = splice(mid, word2);
        if (s1 == word1 && s2 == word2) return synthesized(z1, z2);
        query(s1, "midpoint");
        query(s2, "midpoint");
        if (obs_.is_invalid_guarded(path)) {
            throw ParentInvalidated("invalguard: refined state became invalid");
        }
        KClass m1 = class_at(s1);
        KClass m2 = class_at(s2);
        if (branch_invalid(s1, true)) {
            z1 = m1;
            word1 = s1;
        } else if (branch_invalid(s2, false)) {
            z2 = m2;
            word2 = s2;
        } else if (m1 != z2) {
            z1 = m1;
            word1 = s1;
        } else if (m2 != z1) {
            z2 = m2;
            word2 = s2;
        } else {
            return synthesized(z1, z2);
        }
    }
    throw std::logic_error("invalguard: no border found within the round limit");
}

// ---------------------------------------------------------------------------
// findguard
// ---------------------------------------------------------------------------

bool Refiner::pair_passes(const AdjacentPair& pair, const GuardedWordWithResets& path,
                          int action, const Guard& g) const {
    const size_t n = path.size();
    if (pair.first.size() <= n || pair.second.size() <= n) return false;
    if (pair.first[n].action != action || pair.second[n].action != action) return false;
    const int n_clocks = obs_.num_clocks();
    TimedWordWithResets pre1(pair.first.begin(), pair.first.begin() + n);
    TimedWordWithResets pre2(pair.second.begin(), pair.second.begin() + n);
    if (!satisfies(pre1, path, n_clocks) || !satisfies(pre2, path, n_clocks)) return false;
    auto r1 = run_of(pair.first, n_clocks);
    auto r2 = run_of(pair.second, n_clocks);
    return g.contains(r1[n].at_action) && g.contains(r2[n].at_action);
}

std::vector<std::pair<KClass, TimedWord>> Refiner::collect_invalid(int gstate, int action,
                                                                   const Guard& guard,
                                                                   bool reset) const {
    GuardedWordWithResets path = obs_.gpath(gstate);
    const auto& cstates = obs_.cstates_;
    const auto& cdecisions = obs_.cdecisions_;
    std::vector<std::pair<KClass, TimedWord>> out;

    auto gather = [&](auto&& self, int cid, const KClass& at) -> void {
        for (const TimedWord& w : cstates[cid].words) out.push_back({at, w});
        for (int did : cstates[cid].decisions) {
            for (int child : cdecisions[did].child) self(self, child, at);
        }
    };
    // Class paths are realizable by the words that created them, so the
    // walk needs no feasibility zone (see invalid_dfs).
    auto walk = [&](auto&& self, int cid, size_t depth) -> void {
        if (cstates[cid].invalid) return;
        if (depth == path.size()) {
            for (int did : cstates[cid].decisions) {
                const auto& d = cdecisions[did];
                if (d.action != action || !d.cls.satisfies(guard)) continue;
                int child = d.child[reset ? 1 : 0];
                if (cstates[child].invalid) gather(gather, child, d.cls);
            }
            return;
        }
        const GuardedLetter& l = path[depth];
        for (int did : cstates[cid].decisions) {
            const auto& d = cdecisions[did];
            if (d.action != l.action || !d.cls.satisfies(l.guard)) continue;
            self(self, d.child[l.reset ? 1 : 0], depth + 1);
        }
    };
    walk(walk, obs_.croot(), 0);
    return out;
}

std::vector<Guard> Refiner::findguard(int gstate, int action, const Guard& g) {
    if (g.is_empty()) return {};
    GuardedWordWithResets path = obs_.gpath(gstate);
    const int n_clocks = obs_.num_clocks();
    const std::int64_t k = obs_.k();
    const size_t n = path.size();

    auto split_by = [&](const GuardAtom& atom) -> std::optional<std::vector<Guard>> {
        Guard inside = g.conjoined(atom);
        Guard outside = g.conjoined(negate_atom(atom));
        if (inside.is_empty() || outside.is_empty()) return std::nullopt;
        applied_atoms_.push_back({gstate, action, atom});
        std::vector<Guard> cells = findguard(gstate, action, inside);
        std::vector<Guard> rest = findguard(gstate, action, outside);
        cells.insert(cells.end(), rest.begin(), rest.end());
        return cells;
    };

    // Consistency splits from recorded adjacent pairs passing this cell.
    for (const AdjacentPair& pair : pairs_) {
        if (!pair_passes(pair, path, action, g)) continue;
        for (const DiffQuad& q : consistency_guards(pair, n_clocks, k)) {
            if (q.index != n) continue;
            if (auto cells = split_by({q.clock, q.rel, q.constant})) return *cells;
        }
    }

    // Divergence fences apply ahead of the validity check: the cell they
    // split usually keeps a surviving reset of its own, yet leaving it whole
    // would let the refuted readings below collapse onto one class again.
    for (const ValidityGuard& vg : fence_ledger_) {
        if (vg.depth != static_cast<int>(n) || vg.action != action) continue;
        if (g.conjoined(vg.guard).is_empty()) continue;
        if (auto cells = split_by(materialize_border(vg.clock, vg.rel, vg.constant))) {
            return *cells;
        }
    }

    // If some reset option is free of refuted readings throughout the cell,
    // the cell stands as is.
    GuardedWordWithResets with_true = path;
    with_true.push_back({g, action, true});
    GuardedWordWithResets with_false = path;
    with_false.push_back({g, action, false});
    if (!obs_.is_invalid_guarded(with_true) || !obs_.is_invalid_guarded(with_false)) {
        return {g};
    }

    // Both options touch refuted readings: split along a validity guard,
    // reusing a stored one when it applies at this depth.  Stored guards are
    // matched by position rather than state id, since rebuilds renumber
    // states but leave the split sound for any cell at the same position.
    for (const ValidityGuard& vg : validity_ledger_) {
        if (vg.depth != static_cast<int>(n) || vg.action != action) continue;
        if (!g.subset_of(vg.guard)) continue;
        if (auto cells = split_by(materialize_border(vg.clock, vg.rel, vg.constant))) {
            return *cells;
        }
    }
    auto w1 = collect_invalid(gstate, action, g, true);
    auto w2 = collect_invalid(gstate, action, g, false);
    ValidityGuard vg = invalguard(w1, w2, gstate, action, g);
    auto cells = split_by(materialize_border(vg.clock, vg.rel, vg.constant));
    if (!cells) throw std::logic_error("findguard: validity guard fails to split");
    return *cells;
}

// ---------------------------------------------------------------------------
// rebuild
// ---------------------------------------------------------------------------

void Refiner::rebuild(int gstate) {
    rebuild_rec(gstate);
    obs_.replay_all();
}

void Refiner::rebuild_rec(int gstate) {
    if (!obs_.gstates_[gstate].alive) return;
    GuardedWordWithResets path = obs_.gpath(gstate);
    if (gstate != obs_.groot() && obs_.is_invalid_guarded(path)) {
        // The cell itself became contradictory: excise it like a prune and
        // let the parent's partition be rebuilt.
        int pdec = obs_.gstates_[gstate].parent_decision;
        int slot = obs_.gstates_[gstate].parent_reset ? 1 : 0;
        obs_.kill_gstate(gstate);
        obs_.gdecisions_[pdec].child[slot] = -1;
        int other = obs_.gdecisions_[pdec].child[1 - slot];
        if (other == -1 || !obs_.gstates_[other].alive) {
            obs_.gdecisions_[pdec].alive = false;
            obs_.schedule_rebuild(obs_.gdecisions_[pdec].parent_state);
        }
        return;
    }

    for (int did : std::vector<int>(obs_.gstates_[gstate].decisions)) {
        auto& d = obs_.gdecisions_[did];
        if (!d.alive) continue;
        d.alive = false;
        for (int child : d.child) {
            if (child != -1 && obs_.gstates_[child].alive) obs_.kill_gstate(child);
        }
    }
    obs_.gstates_[gstate].decisions.clear();

    const int n_clocks = obs_.num_clocks();
    const size_t n = path.size();
    std::vector<bool> pre = resets_of(path);
    std::set<int> acts;
    for (const auto& [w, label] : obs_.obs_) {
        if (w.size() <= n) continue;
        if (satisfies(with_resets(prefix_of(w, n), pre), path, n_clocks)) {
            acts.insert(w[n].action);
        }
    }

    for (int action : acts) {
        for (const Guard& cell : findguard(gstate, action, Guard::top())) {
            if (obs_.gstates_[gstate].zone.conjoined(cell).is_empty()) continue;
            int did = -1;
            for (int r = 0; r < 2; ++r) {
                GuardedWordWithResets extended = path;
                extended.push_back({cell, action, r == 1});
                if (obs_.is_invalid_guarded(extended)) continue;
                bool label = obs_.request_guarded(extended);
                if (obs_.is_invalid_guarded(obs_.gpath(gstate))) {
                    throw ParentInvalidated("rebuild: state under reconstruction invalidated");
                }
                if (obs_.is_invalid_guarded(extended)) continue;
                if (did == -1) did = obs_.new_gdecision(gstate, action, cell);
                Zone z = obs_.gstates_[gstate].zone.conjoined(cell);
                if (r == 1) z = z.with_reset(action);
                int child = obs_.new_gstate(did, r == 1, static_cast<int>(n) + 1, z.future());
                obs_.gdecisions_[did].child[r] = child;
                obs_.gstates_[child].labels.insert(label);
                rebuild_rec(child);
            }
            if (did == -1) {
                // Refutations discovered by the queries above invalidated
                // both reset options of this cell after findguard vouched
                // for it; the partition is stale, so redo this state.
                obs_.schedule_rebuild(gstate);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Traceability
// ---------------------------------------------------------------------------

void Refiner::check_well_guarded() const {
    for (const auto& d : obs_.gdecisions()) {
        if (!d.alive || d.guard.is_top()) continue;
        for (const GuardAtom& atom : d.guard.atoms()) {
            bool traced = false;
            for (const AppliedAtom& e : applied_atoms_) {
                if (e.gstate == d.parent_state && e.action == d.action &&
                    e.atom.clock == atom.clock && e.atom.constant == atom.constant) {
                    traced = true;
                    break;
                }
            }
            if (!traced) {
                throw std::logic_error("well-guardedness: untraceable guard atom");
            }
        }
    }
}

}  // namespace rerl
