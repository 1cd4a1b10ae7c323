#include "rerl/observation.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rerl {

namespace {

TimedWord prefix_of(const TimedWord& w, size_t n) {
    return TimedWord(w.begin(), w.begin() + n);
}

bool holds_word(const std::vector<TimedWord>& ws, const TimedWord& w) {
    return std::find(ws.begin(), ws.end(), w) != ws.end();
}

// The box of per-clock class constraints as a guard (strict bounds for the
// open intervals).
Guard class_box(const KClass& cls) {
    Guard g;
    for (int c = 0; c < cls.size(); ++c) {
        const ClassAtom& a = cls.atom(c);
        switch (a.kind) {
            case ClassAtom::Point:
                g = g.conjoined({c, Rel::Eq, a.n});
                break;
            case ClassAtom::Open:
                g = g.conjoined({c, Rel::Gt, a.n}).conjoined({c, Rel::Lt, a.n + 1});
                break;
            case ClassAtom::AboveK:
                g = g.conjoined({c, Rel::Gt, cls.k()});
                break;
        }
    }
    return g;
}

}  // namespace

Observations::Observations(Teacher& teacher, std::int64_t k) : teacher_(teacher), k_(k) {
    if (k < 0) throw std::runtime_error("observations: negative bound");
    GState root;
    root.id = 0;
    root.zone = Zone::zero_point(num_clocks()).future();
    gstates_.push_back(std::move(root));
    CState croot_state;
    croot_state.id = 0;
    croot_state.cls = KClass::of(ClockValuation(num_clocks()), k_);
    cstates_.push_back(std::move(croot_state));
}

// ---------------------------------------------------------------------------
// Node constructors
// ---------------------------------------------------------------------------

int Observations::new_gstate(int parent_decision, bool parent_reset, int depth,
                             Zone zone) {
    GState s;
    s.id = static_cast<int>(gstates_.size());
    s.parent_decision = parent_decision;
    s.parent_reset = parent_reset;
    s.depth = depth;
    s.zone = std::move(zone);
    gstates_.push_back(std::move(s));
    return gstates_.back().id;
}

int Observations::new_gdecision(int parent_state, int action, Guard guard) {
    GDecision d;
    d.id = static_cast<int>(gdecisions_.size());
    d.parent_state = parent_state;
    d.action = action;
    d.guard = std::move(guard);
    gdecisions_.push_back(std::move(d));
    gstates_[parent_state].decisions.push_back(gdecisions_.back().id);
    return gdecisions_.back().id;
}

int Observations::new_cstate(int parent_decision, bool parent_reset, int depth,
                             KClass cls) {
    CState s;
    s.id = static_cast<int>(cstates_.size());
    s.parent_decision = parent_decision;
    s.parent_reset = parent_reset;
    s.depth = depth;
    s.cls = std::move(cls);
    cstates_.push_back(std::move(s));
    return cstates_.back().id;
}

int Observations::new_cdecision(int parent_state, KClass cls, int action) {
    CDecision d;
    d.id = static_cast<int>(cdecisions_.size());
    d.parent_state = parent_state;
    d.cls = std::move(cls);
    d.action = action;
    cdecisions_.push_back(std::move(d));
    cstates_[parent_state].decisions.push_back(cdecisions_.back().id);
    return cdecisions_.back().id;
}

// ---------------------------------------------------------------------------
// Observation intake
// ---------------------------------------------------------------------------

bool Observations::request(const TimedWord& w) {
    auto it = obs_.find(w);
    if (it != obs_.end()) return it->second;
    bool label = teacher_.member(w);
    obs_.emplace(w, label);
    findpath_class(croot(), ClockValuation(num_clocks()), w, 0, label);
    return label;
}

void Observations::add_labeled(const TimedWord& w, bool label) {
    if (obs_.count(w)) throw std::logic_error("observations: word already recorded");
    obs_.emplace(w, label);
    findpath_class(croot(), ClockValuation(num_clocks()), w, 0, label);
}

void Observations::ingest(const TimedWord& w) {
    bool label = request(w);
    // Re-thread the class tree first: the guard-tree walk follows the class
    // reading in lockstep, so every live reading of w must be materialized.
    findpath_class(croot(), ClockValuation(num_clocks()), w, 0, label);
    findpath_guard(groot(), croot(), ClockValuation(num_clocks()), w, 0, label);
}

void Observations::replay_all() {
    flags_dirty_ = false;
    for (auto& s : gstates_) {
        if (s.alive) s.labels.clear();
    }
    // The class tree needs no replay: it is append-only, every recorded word
    // was threaded through it when recorded, and invalidity flags only close
    // readings, never reopen them.
    for (const auto& [w, label] : obs_) {
        findpath_guard(groot(), croot(), ClockValuation(num_clocks()), w, 0, label);
    }
}

void Observations::refresh_if_stale() {
    if (flags_dirty_) replay_all();
}

// ---------------------------------------------------------------------------
// Class-tree descent
// ---------------------------------------------------------------------------

void Observations::findpath_class(int sid, const ClockValuation& v, const TimedWord& w,
                                  size_t pos, bool label) {
    if (cstates_[sid].invalid) return;
    if (pos == w.size()) {
        CState& s = cstates_[sid];
        if (!holds_word(s.words, w)) s.words.push_back(w);
        s.labels.insert(label);
        if (s.labels.size() >= 2 && !s.invalid) mark_invalid(sid, w);
        return;
    }
    const TimedLetter& l = w[pos];
    ClockValuation u = v.elapsed(l.delay);
    KClass cls = KClass::of(u, k_);
    int did = -1;
    for (int cand : cstates_[sid].decisions) {
        const CDecision& d = cdecisions_[cand];
        if (d.action == l.action && d.cls == cls) {
            did = cand;
            break;
        }
    }
    if (did == -1) did = addword_class(sid, cls, l.action, prefix_of(w, pos + 1));
    for (int r = 0; r < 2; ++r) {
        int child = cdecisions_[did].child[r];
        if (cstates_[child].invalid) continue;
        ClockValuation next = r ? u.with_reset(l.action) : u;
        findpath_class(child, next, w, pos + 1, label);
    }
}

int Observations::addword_class(int sid, const KClass& cls, int action,
                                const TimedWord& prefix) {
    int did = new_cdecision(sid, cls, action);
    int depth = cstates_[sid].depth + 1;
    int child_n = new_cstate(did, false, depth, cls);
    int child_r = new_cstate(did, true, depth, cls.with_reset(action));
    cdecisions_[did].child = {child_n, child_r};
    bool known = obs_.count(prefix) > 0;
    bool label = request(prefix);
    if (known) {
        // The recorded prefix predates these children; re-thread it so they
        // carry its label and stored word like freshly requested prefixes do.
        findpath_class(croot(), ClockValuation(num_clocks()), prefix, 0, label);
    }
    return did;
}

void Observations::mark_invalid(int sid, const TimedWord& word) {
    CState& s = cstates_[sid];
    if (s.invalid) return;
    s.invalid = true;
    flags_dirty_ = true;
    prune_queue_.push_back(
        {prefix_of(word, static_cast<size_t>(s.depth)), cresets(sid)});
    if (s.parent_decision == -1) {
        throw std::logic_error("observations: root marked invalid");
    }
    const CDecision& d = cdecisions_[s.parent_decision];
    int sibling = d.child[s.parent_reset ? 0 : 1];
    if (cstates_[sibling].invalid) mark_invalid(d.parent_state, word);
}

// ---------------------------------------------------------------------------
// Guard-tree descent
// ---------------------------------------------------------------------------

void Observations::findpath_guard(int sid, int cid, const ClockValuation& v,
                                  const TimedWord& w, size_t pos, bool label) {
    if (!gstates_[sid].alive) return;
    // The class tree walks in lockstep; once it refutes this reading, the
    // thread stops contributing labels along it.
    if (cstates_[cid].invalid) return;
    if (pos == w.size()) {
        gstates_[sid].labels.insert(label);
        return;
    }
    const TimedLetter& l = w[pos];
    ClockValuation u = v.elapsed(l.delay);
    KClass cls = KClass::of(u, k_);
    int cdid = -1;
    for (int cand : cstates_[cid].decisions) {
        const CDecision& d = cdecisions_[cand];
        if (d.action == l.action && d.cls == cls) {
            cdid = cand;
            break;
        }
    }
    if (cdid == -1) {
        // ingest/replay_all re-thread the class tree before the guard tree,
        // so every live reading of a recorded word is materialized.
        throw std::logic_error("observations: class reading not materialized");
    }
    int match = -1;
    bool has_action = false;
    for (int cand : gstates_[sid].decisions) {
        const GDecision& d = gdecisions_[cand];
        if (!d.alive || d.action != l.action) continue;
        has_action = true;
        if (d.guard.contains(u)) {
            match = cand;
            break;
        }
    }
    if (match == -1) {
        if (has_action) {
            // The partition has no cell covering u.  If the class tree
            // refutes this step whichever way it resets, the thread
            // legitimately ends here; otherwise a cell is genuinely missing
            // and a rebuild re-derives it (replay then restores w).
            bool live = !cstates_[cdecisions_[cdid].child[0]].invalid ||
                        !cstates_[cdecisions_[cdid].child[1]].invalid;
            if (live) schedule_rebuild(sid);
            return;
        }
        match = addword_guard(sid, l.action);
        // Seed the fresh children with the recorded prefix's label, but only
        // along readings the class tree still admits.
        auto it = obs_.find(prefix_of(w, pos + 1));
        if (it == obs_.end()) {
            throw std::logic_error("observations: guard-tree prefix not recorded");
        }
        for (int r = 0; r < 2; ++r) {
            if (!cstates_[cdecisions_[cdid].child[r]].invalid) {
                gstates_[gdecisions_[match].child[r]].labels.insert(it->second);
            }
        }
    }
    for (int r = 0; r < 2; ++r) {
        int child = gdecisions_[match].child[r];
        if (child == -1 || !gstates_[child].alive) continue;
        ClockValuation next = r ? u.with_reset(l.action) : u;
        findpath_guard(child, cdecisions_[cdid].child[r], next, w, pos + 1, label);
    }
}

int Observations::addword_guard(int sid, int action) {
    int did = new_gdecision(sid, action, Guard::top());
    int depth = gstates_[sid].depth + 1;
    Zone base = gstates_[sid].zone;  // conjoining the trivial guard is a no-op
    int child_n = new_gstate(did, false, depth, base.future());
    int child_r = new_gstate(did, true, depth, base.with_reset(action).future());
    gdecisions_[did].child = {child_n, child_r};
    return did;
}

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

void Observations::drain_prunes() {
    while (!prune_queue_.empty()) {
        auto [prefix, resets] = prune_queue_.front();
        prune_queue_.pop_front();
        execute_prune(prefix, resets);
        ++prunes_executed_;
        if (after_prune_hook) after_prune_hook();
    }
}

void Observations::execute_prune(const TimedWord& prefix, const std::vector<bool>& resets) {
    if (prefix.empty()) return;
    int sid = groot();
    ClockValuation v(num_clocks());
    for (size_t i = 0; i < prefix.size(); ++i) {
        if (!gstates_[sid].alive) return;
        const TimedLetter& l = prefix[i];
        ClockValuation u = v.elapsed(l.delay);
        int match = -1;
        for (int cand : gstates_[sid].decisions) {
            const GDecision& d = gdecisions_[cand];
            if (d.alive && d.action == l.action && d.guard.contains(u)) {
                match = cand;
                break;
            }
        }
        if (match == -1) return;  // path already restructured
        int child = gdecisions_[match].child[resets[i] ? 1 : 0];
        if (child == -1 || !gstates_[child].alive) return;
        if (i + 1 == prefix.size()) {
            kill_gstate(child);
            gdecisions_[match].child[resets[i] ? 1 : 0] = -1;
            int other = gdecisions_[match].child[resets[i] ? 0 : 1];
            if (other == -1 || !gstates_[other].alive) {
                gdecisions_[match].alive = false;
                schedule_rebuild(gdecisions_[match].parent_state);
            }
            return;
        }
        v = resets[i] ? u.with_reset(l.action) : u;
        sid = child;
    }
}

void Observations::kill_gstate(int sid) {
    GState& s = gstates_[sid];
    s.alive = false;
    for (int did : s.decisions) {
        GDecision& d = gdecisions_[did];
        if (!d.alive) continue;
        d.alive = false;
        for (int child : d.child) {
            if (child != -1 && gstates_[child].alive) kill_gstate(child);
        }
    }
}

// ---------------------------------------------------------------------------
// Rebuild scheduling
// ---------------------------------------------------------------------------

void Observations::schedule_rebuild(int gstate) { rebuild_queue_.push_back(gstate); }

void Observations::normalize_rebuild_queue() {
    std::set<int> entries;
    for (int sid : rebuild_queue_) {
        if (gstates_[sid].alive) entries.insert(sid);
    }
    std::vector<int> kept;
    for (int sid : entries) {
        bool subsumed = false;
        for (int cur = sid; !subsumed && gstates_[cur].parent_decision != -1;) {
            cur = gdecisions_[gstates_[cur].parent_decision].parent_state;
            if (cur != sid && entries.count(cur)) subsumed = true;
        }
        if (!subsumed) kept.push_back(sid);
    }
    std::sort(kept.begin(), kept.end(), [&](int a, int b) {
        if (gstates_[a].depth != gstates_[b].depth) {
            return gstates_[a].depth < gstates_[b].depth;
        }
        return a < b;
    });
    rebuild_queue_ = std::move(kept);
}

bool Observations::under_scheduled(int gstate) const {
    std::set<int> queued(rebuild_queue_.begin(), rebuild_queue_.end());
    for (int cur = gstate;;) {
        if (queued.count(cur)) return true;
        if (gstates_[cur].parent_decision == -1) return false;
        cur = gdecisions_[gstates_[cur].parent_decision].parent_state;
    }
}

// ---------------------------------------------------------------------------
// Inconsistencies
// ---------------------------------------------------------------------------

std::vector<int> Observations::inconsistent_gstates() const {
    std::vector<int> out;
    for (const GState& s : gstates_) {
        if (s.alive && s.labels.size() >= 2) out.push_back(s.id);
    }
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        if (gstates_[a].depth != gstates_[b].depth) {
            return gstates_[a].depth < gstates_[b].depth;
        }
        return a < b;
    });
    return out;
}

std::pair<TimedWord, TimedWord> Observations::witnesses(int gstate) const {
    GuardedWordWithResets path = gpath(gstate);
    std::vector<bool> resets;
    for (const auto& l : path) resets.push_back(l.reset);
    std::optional<TimedWord> accepted, rejected;
    for (const auto& [w, label] : obs_) {
        if (w.size() != path.size()) continue;
        if (label && accepted) continue;
        if (!label && rejected) continue;
        TimedWordWithResets wr = with_resets(w, resets);
        if (!satisfies(wr, path, num_clocks())) continue;
        // Skip readings the class tree has refuted: only live readings
        // contribute labels, so an inconsistency always has live witnesses.
        if (kword_invalid(k_closed_word_of(wr, num_clocks(), k_))) continue;
        (label ? accepted : rejected) = w;
        if (accepted && rejected) break;
    }
    if (!accepted || !rejected) {
        throw std::logic_error("observations: inconsistent state lacks witnesses");
    }
    return {*accepted, *rejected};
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

GuardedWordWithResets Observations::gpath(int gstate) const {
    GuardedWordWithResets path;
    for (int cur = gstate; gstates_[cur].parent_decision != -1;) {
        const GState& s = gstates_[cur];
        const GDecision& d = gdecisions_[s.parent_decision];
        path.push_back({d.guard, d.action, s.parent_reset});
        cur = d.parent_state;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<bool> Observations::cresets(int cstate) const {
    std::vector<bool> resets;
    for (int cur = cstate; cstates_[cur].parent_decision != -1;) {
        const CState& s = cstates_[cur];
        resets.push_back(s.parent_reset);
        cur = cdecisions_[s.parent_decision].parent_state;
    }
    std::reverse(resets.begin(), resets.end());
    return resets;
}

int Observations::ancestor_at_depth(int gstate, int depth) const {
    int cur = gstate;
    while (gstates_[cur].depth > depth) {
        cur = gdecisions_[gstates_[cur].parent_decision].parent_state;
    }
    if (gstates_[cur].depth != depth) {
        throw std::logic_error("observations: ancestor depth overshoot");
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Invalidity of symbolic words
// ---------------------------------------------------------------------------

bool Observations::is_invalid_guarded(const GuardedWordWithResets& gw) const {
    return invalid_dfs(croot(), gw, 0);
}

bool Observations::invalid_dfs(int cid, const GuardedWordWithResets& gw,
                               size_t depth) const {
    if (cstates_[cid].invalid) return true;
    if (depth == gw.size()) return false;
    // No feasibility zone is needed: every alive class path was materialized
    // by walking a concrete timed word under these resets, so a path whose
    // classes sit inside the guards is realizable by that very word.
    const GuardedLetter& l = gw[depth];
    for (int did : cstates_[cid].decisions) {
        const CDecision& d = cdecisions_[did];
        if (d.action != l.action || !d.cls.satisfies(l.guard)) continue;
        if (invalid_dfs(d.child[l.reset ? 1 : 0], gw, depth + 1)) return true;
    }
    return false;
}

std::optional<int> Observations::locate(const KClosedWord& kw) const {
    int cur = croot();
    for (const auto& l : kw) {
        int next = -1;
        for (int did : cstates_[cur].decisions) {
            const CDecision& d = cdecisions_[did];
            if (d.action == l.action && d.cls == l.at_action) {
                next = d.child[l.reset ? 1 : 0];
                break;
            }
        }
        if (next == -1) return std::nullopt;
        cur = next;
    }
    return cur;
}

bool Observations::kword_invalid(const KClosedWord& kw) const {
    int cur = croot();
    if (cstates_[cur].invalid) return true;
    for (const auto& l : kw) {
        int next = -1;
        for (int did : cstates_[cur].decisions) {
            const CDecision& d = cdecisions_[did];
            if (d.action == l.action && d.cls == l.at_action) {
                next = d.child[l.reset ? 1 : 0];
                break;
            }
        }
        if (next == -1) return false;  // unexplored, hence unconfirmed
        cur = next;
        if (cstates_[cur].invalid) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Labels for guarded words
// ---------------------------------------------------------------------------

bool Observations::request_guarded(const GuardedWordWithResets& gw) {
    auto stored = stored_dive(croot(), gw, 0);
    if (stored) return request(*stored);
    return request(synthesize_witness(gw));
}

std::optional<TimedWord> Observations::stored_dive(int cid, const GuardedWordWithResets& gw,
                                                   size_t depth) const {
    if (cstates_[cid].invalid) return std::nullopt;
    if (depth == gw.size()) {
        const auto& ws = cstates_[cid].words;
        if (!ws.empty()) return ws.front();
        return std::nullopt;
    }
    const GuardedLetter& l = gw[depth];
    for (int did : cstates_[cid].decisions) {
        const CDecision& d = cdecisions_[did];
        if (d.action != l.action || !d.cls.satisfies(l.guard)) continue;
        auto found = stored_dive(d.child[l.reset ? 1 : 0], gw, depth + 1);
        if (found) return found;
    }
    return std::nullopt;
}

TimedWord Observations::synthesize_witness(const GuardedWordWithResets& gw) const {
    int n = static_cast<int>(gw.size());
    if (n == 0) return {};
    // Timestamp system: variable i holds the absolute time of letter i+1.
    Zone z = Zone::universal(n);
    for (int i = 1; i < n; ++i) z = z.conjoined_diff(i, i - 1, Rel::Ge, Rat(0));
    for (int i = 0; i < n; ++i) {
        for (const auto& atom : gw[i].guard.atoms()) {
            // The clock's value at letter i+1 spans back to its last reset.
            int anchor = -1;
            for (int j = i - 1; j >= 0; --j) {
                if (gw[j].action == atom.clock && gw[j].reset) {
                    anchor = j;
                    break;
                }
            }
            z = z.conjoined_diff(i, anchor, atom.rel, Rat(atom.constant));
        }
    }
    auto times = z.sample();
    if (!times) {
        throw std::logic_error("observations: witness synthesis on infeasible word");
    }
    TimedWord w;
    Rat prev(0);
    for (int i = 0; i < n; ++i) {
        w.push_back({(*times)[i] - prev, gw[i].action});
        prev = (*times)[i];
    }
    return w;
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

std::string Observations::tdg_dot() const {
    const Alphabet& sigma = alphabet();
    std::ostringstream out;
    out << "digraph decision_graph {\n  rankdir=TB;\n";
    for (const GState& s : gstates_) {
        if (!s.alive) continue;
        std::string label;
        for (bool b : s.labels) label += b ? "+" : "-";
        if (label.empty()) label = "?";
        out << "  s" << s.id << " [shape=ellipse, label=\"" << label << "\"];\n";
    }
    for (const GDecision& d : gdecisions_) {
        if (!d.alive) continue;
        out << "  d" << d.id << " [shape=box, label=\"" << sigma.action(d.action)
            << ", " << d.guard.to_string(sigma) << "\"];\n";
        out << "  s" << d.parent_state << " -> d" << d.id << ";\n";
        for (int r = 0; r < 2; ++r) {
            if (d.child[r] == -1 || !gstates_[d.child[r]].alive) continue;
            out << "  d" << d.id << " -> s" << d.child[r] << " [label=\""
                << (r ? "reset" : "keep") << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string Observations::tog_dot() const {
    const Alphabet& sigma = alphabet();
    std::ostringstream out;
    out << "digraph observation_graph {\n  rankdir=TB;\n";
    for (const CState& s : cstates_) {
        std::string label;
        for (bool b : s.labels) label += b ? "+" : "-";
        if (label.empty()) label = "?";
        out << "  c" << s.id << " [shape=ellipse, label=\"" << label << "\""
            << (s.invalid ? ", style=filled, fillcolor=lightcoral" : "") << "];\n";
    }
    for (const CDecision& d : cdecisions_) {
        out << "  k" << d.id << " [shape=box, label=\"" << sigma.action(d.action)
            << ", " << d.cls.to_string(sigma) << "\"];\n";
        out << "  c" << d.parent_state << " -> k" << d.id << ";\n";
        for (int r = 0; r < 2; ++r) {
            out << "  k" << d.id << " -> c" << d.child[r] << " [label=\""
                << (r ? "reset" : "keep") << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Invariant checks
// ---------------------------------------------------------------------------

void Observations::check_tree_shape() const {
    auto fail = [](const std::string& what) {
        throw std::logic_error("tree shape: " + what);
    };
    if (gstates_.empty() || !gstates_[0].alive) fail("guard root missing");
    for (const GState& s : gstates_) {
        if (!s.alive) continue;
        if (s.id == 0) {
            if (s.parent_decision != -1 || s.depth != 0) fail("bad guard root");
            continue;
        }
        if (s.parent_decision < 0) fail("alive state without parent");
        const GDecision& d = gdecisions_[s.parent_decision];
        if (!d.alive) fail("alive state under dead decision");
        if (d.child[s.parent_reset ? 1 : 0] != s.id) fail("parent link mismatch");
        if (d.id >= s.id) fail("child created before parent decision");
        if (s.depth != gstates_[d.parent_state].depth + 1) fail("depth mismatch");
    }
    for (const GDecision& d : gdecisions_) {
        if (!d.alive) continue;
        if (!gstates_[d.parent_state].alive) fail("alive decision under dead state");
        bool has_child = false;
        for (int r = 0; r < 2; ++r) {
            if (d.child[r] == -1) continue;
            if (!gstates_[d.child[r]].alive) fail("alive decision with dead child");
            if (gstates_[d.child[r]].parent_decision != d.id) fail("child backlink");
            has_child = true;
        }
        if (!has_child) fail("alive decision without children");
        const auto& list = gstates_[d.parent_state].decisions;
        if (std::find(list.begin(), list.end(), d.id) == list.end()) {
            fail("decision missing from parent list");
        }
    }
    for (const CState& s : cstates_) {
        if (s.id == 0) continue;
        const CDecision& d = cdecisions_[s.parent_decision];
        if (d.child[s.parent_reset ? 1 : 0] != s.id) fail("class parent link");
        if (s.depth != cstates_[d.parent_state].depth + 1) fail("class depth");
    }
    for (const CDecision& d : cdecisions_) {
        if (d.child[0] == -1 || d.child[1] == -1) fail("class decision incomplete");
        if (!(cstates_[d.child[0]].cls == d.cls)) fail("keep-child class mismatch");
        if (!(cstates_[d.child[1]].cls == d.cls.with_reset(d.action))) {
            fail("reset-child class mismatch");
        }
    }
}

void Observations::check_guard_partitions() const {
    auto fail = [](const std::string& what) {
        throw std::logic_error("guard partition: " + what);
    };
    for (const GState& s : gstates_) {
        if (!s.alive || under_scheduled(s.id)) continue;
        for (int a = 0; a < num_clocks(); ++a) {
            std::vector<const GDecision*> ds;
            for (int did : s.decisions) {
                const GDecision& d = gdecisions_[did];
                if (d.alive && d.action == a) ds.push_back(&d);
            }
            if (ds.empty()) continue;
            for (size_t i = 0; i < ds.size(); ++i) {
                for (size_t j = i + 1; j < ds.size(); ++j) {
                    if (!ds[i]->guard.disjoint_with(ds[j]->guard)) {
                        fail("overlapping cells");
                    }
                }
            }
            // Exhaustiveness: whatever the cells miss must be unreachable or
            // refuted under both reset alternatives per class.
            std::vector<Guard> rest{Guard::top()};
            for (const GDecision* d : ds) {
                std::vector<Guard> next;
                for (const Guard& cell : rest) {
                    for (const Guard& piece : d->guard.complement_cells(num_clocks())) {
                        Guard g = cell.conjoined(piece);
                        if (!g.is_empty()) next.push_back(g);
                    }
                }
                rest = std::move(next);
            }
            GuardedWordWithResets path = gpath(s.id);
            for (const Guard& cell : rest) {
                if (s.zone.conjoined(cell).is_empty()) continue;
                for (const KClass& cls : classes_within(cell)) {
                    if (s.zone.conjoined(cls).conjoined(cell).is_empty()) continue;
                    GuardedWordWithResets keep = path, reset = path;
                    Guard box = class_box(cls);
                    keep.push_back({box, a, false});
                    reset.push_back({box, a, true});
                    if (!is_invalid_guarded(keep) || !is_invalid_guarded(reset)) {
                        fail("reachable class not covered");
                    }
                }
            }
        }
    }
}

std::vector<KClass> Observations::classes_within(const Guard& cell) const {
    std::vector<std::vector<ClassAtom>> per_clock(num_clocks());
    for (int c = 0; c < num_clocks(); ++c) {
        std::vector<ClassAtom> all;
        for (std::int64_t n = 0; n <= k_; ++n) {
            all.push_back(ClassAtom::point(n));
            if (n < k_) all.push_back(ClassAtom::open(n));
        }
        all.push_back(ClassAtom::above());
        Guard::Bounds b = cell.bounds(c);
        for (const ClassAtom& a : all) {
            // Keep atoms overlapping the cell's interval for this clock.
            bool above_low = a.satisfies(b.lower_strict ? Rel::Gt : Rel::Ge,
                                         b.lower, k_);
            bool below_up = !b.upper || a.satisfies(b.upper_strict ? Rel::Lt : Rel::Le,
                                                    *b.upper, k_);
            if (above_low && below_up) per_clock[c].push_back(a);
        }
    }
    std::vector<KClass> out;
    std::vector<int> pick(num_clocks(), 0);
    for (;;) {
        std::vector<ClassAtom> atoms;
        for (int c = 0; c < num_clocks(); ++c) atoms.push_back(per_clock[c][pick[c]]);
        out.emplace_back(std::move(atoms), k_);
        int c = num_clocks() - 1;
        while (c >= 0 && ++pick[c] == static_cast<int>(per_clock[c].size())) {
            pick[c] = 0;
            --c;
        }
        if (c < 0) break;
    }
    return out;
}

void Observations::check_zone_correspondence() const {
    for (const GState& s : gstates_) {
        if (!s.alive) continue;
        auto zones = zone_states_of(gpath(s.id), num_clocks());
        if (!(zones.back() == s.zone)) {
            throw std::logic_error("zone correspondence: stored zone differs");
        }
    }
}

void Observations::check_class_coverage() const {
    struct Walker {
        const Observations& o;
        const TimedWord& w;
        bool label;

        void walk(int cid, const ClockValuation& v, size_t pos) {
            const CState& s = o.cstates_[cid];
            if (s.invalid) return;
            if (pos == w.size()) {
                if (!s.labels.count(label) || !holds_word(s.words, w)) {
                    throw std::logic_error("class coverage: terminal incomplete");
                }
                return;
            }
            ClockValuation u = v.elapsed(w[pos].delay);
            KClass cls = KClass::of(u, o.k_);
            int did = -1;
            for (int cand : s.decisions) {
                const CDecision& d = o.cdecisions_[cand];
                if (d.action == w[pos].action && d.cls == cls) {
                    did = cand;
                    break;
                }
            }
            if (did == -1) {
                throw std::logic_error("class coverage: missing decision");
            }
            for (int r = 0; r < 2; ++r) {
                ClockValuation next = r ? u.with_reset(w[pos].action) : u;
                walk(o.cdecisions_[did].child[r], next, pos + 1);
            }
        }
    };
    for (const auto& [w, label] : obs_) {
        Walker{*this, w, label}.walk(croot(), ClockValuation(num_clocks()), 0);
    }
}

}  // namespace rerl
