#include "rerl/regions.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <tuple>

namespace rerl {

namespace {

// A classical clock region over `n` clocks with maximal constant K,
// represented combinatorially: per clock either "above K" or an integer
// part in [0, K], plus the ordering of the fractional parts.  groups[0] is
// the (possibly empty) set of clocks with fraction 0; the following groups
// hold clocks with equal positive fractions, in increasing fractional
// order.  A clock with integer part K must have fraction 0.
struct Region {
    struct CB {
        bool above = false;
        std::int64_t c = 0;
        auto operator<=>(const CB&) const = default;
    };
    std::vector<CB> clocks;
    std::vector<std::vector<int>> groups;

    auto operator<=>(const Region&) const = default;

    bool frac_zero(int x) const {
        return std::find(groups[0].begin(), groups[0].end(), x) != groups[0].end();
    }
};

Region initial_region(int n) {
    Region r;
    r.clocks.assign(n, {});
    r.groups.emplace_back();
    for (int x = 0; x < n; ++x) r.groups[0].push_back(x);
    return r;
}

// The immediate delay successor; a fixpoint once every clock is above K.
Region delay_successor(const Region& r, std::int64_t k) {
    Region s = r;
    if (!s.groups[0].empty()) {
        // Clocks with fraction 0 acquire an infinitesimal fraction; those
        // already at K leave the bounded range instead.
        std::vector<int> moved;
        for (int x : s.groups[0]) {
            if (s.clocks[x].c == k) {
                s.clocks[x].above = true;
            } else {
                moved.push_back(x);
            }
        }
        s.groups[0].clear();
        if (!moved.empty()) {
            s.groups.insert(s.groups.begin() + 1, std::move(moved));
        }
        return s;
    }
    if (s.groups.size() == 1) return s;  // everything above K: stable
    // The largest fractional group reaches the next integer.
    std::vector<int> reached = std::move(s.groups.back());
    s.groups.pop_back();
    for (int x : reached) s.clocks[x].c += 1;
    std::sort(reached.begin(), reached.end());
    s.groups[0] = std::move(reached);
    return s;
}

// Whether every valuation of the region satisfies the atom (regions are
// uniform for comparisons with integer constants up to K).
bool region_satisfies(const Region& r, int clock, Rel rel, std::int64_t n) {
    const Region::CB& cb = r.clocks[clock];
    bool frac0 = !cb.above && r.frac_zero(clock);
    switch (rel) {
        case Rel::Lt: return !cb.above && cb.c < n;
        case Rel::Le: return !cb.above && (frac0 ? cb.c <= n : cb.c < n);
        case Rel::Eq: return !cb.above && frac0 && cb.c == n;
        case Rel::Ge: return cb.above || cb.c >= n;
        case Rel::Gt: return cb.above || (frac0 ? cb.c > n : cb.c >= n);
    }
    return false;
}

bool region_satisfies(const Region& r, const Guard& g, int clock_offset) {
    if (g.is_empty()) return false;
    for (const auto& a : g.atoms()) {
        if (!region_satisfies(r, clock_offset + a.clock, a.rel, a.constant)) return false;
    }
    return true;
}

Region reset_clocks(const Region& r, const std::vector<int>& clocks) {
    Region s = r;
    for (int x : clocks) {
        s.clocks[x] = {};
        for (auto& g : s.groups) g.erase(std::remove(g.begin(), g.end(), x), g.end());
        s.groups[0].push_back(x);
    }
    std::sort(s.groups[0].begin(), s.groups[0].end());
    s.groups[0].erase(std::unique(s.groups[0].begin(), s.groups[0].end()),
                      s.groups[0].end());
    for (size_t i = 1; i < s.groups.size();) {
        if (s.groups[i].empty()) {
            s.groups.erase(s.groups.begin() + i);
        } else {
            ++i;
        }
    }
    return s;
}

struct NodeRec {
    int la = 0, lb = 0;
    Region stable;
    int parent = -1;
    int action = -1;
    Region at_action;          // region in which the action fired
    std::vector<int> resets;   // product clocks reset by the step
};

// Feasible delays from valuation v into the target region, as an interval.
struct Interval {
    Rat lo{0};
    bool lo_strict = false;
    std::optional<Rat> hi;
    bool hi_strict = false;
};

void tighten_lower(Interval& iv, const Rat& lo, bool strict) {
    if (lo > iv.lo || (lo == iv.lo && strict && !iv.lo_strict)) {
        iv.lo = lo;
        iv.lo_strict = strict;
    }
}

void tighten_upper(Interval& iv, const Rat& hi, bool strict) {
    if (!iv.hi || hi < *iv.hi || (hi == *iv.hi && strict && !iv.hi_strict)) {
        iv.hi = hi;
        iv.hi_strict = strict;
    }
}

Rat pick_delay(const Region& target, const ClockValuation& v, std::int64_t k) {
    Interval iv;  // t >= 0
    for (int x = 0; x < static_cast<int>(target.clocks.size()); ++x) {
        const Region::CB& cb = target.clocks[x];
        if (cb.above) {
            tighten_lower(iv, Rat(k) - v[x], true);
        } else if (target.frac_zero(x)) {
            tighten_lower(iv, Rat(cb.c) - v[x], false);
            tighten_upper(iv, Rat(cb.c) - v[x], false);
        } else {
            tighten_lower(iv, Rat(cb.c) - v[x], true);
            tighten_upper(iv, Rat(cb.c + 1) - v[x], true);
        }
    }
    if (iv.hi) {
        if (iv.lo > *iv.hi || (iv.lo == *iv.hi && (iv.lo_strict || iv.hi_strict))) {
            throw std::logic_error("region concretization: empty delay interval");
        }
        if (iv.lo == *iv.hi) return iv.lo;
        return (iv.lo + *iv.hi) / 2;
    }
    return iv.lo_strict ? iv.lo + Rat(1, 2) : iv.lo;
}

}  // namespace

std::optional<EquivCounterexample> find_difference(const Rera& a, const Rera& b) {
    if (!(a.alphabet == b.alphabet)) {
        throw std::runtime_error("equivalence: alphabets differ");
    }
    const int nact = a.alphabet.size();
    const int nclocks = 2 * nact;  // private copies of the clocks
    const std::int64_t k = std::max(a.max_constant, b.max_constant);
    const Rera ca = a.completed();
    const Rera cb = b.completed();

    std::vector<NodeRec> nodes;
    std::map<std::tuple<int, int, Region>, int> seen;
    std::deque<int> queue;

    auto make_node = [&](NodeRec rec) -> std::optional<int> {
        auto key = std::make_tuple(rec.la, rec.lb, rec.stable);
        auto [it, inserted] = seen.emplace(key, static_cast<int>(nodes.size()));
        if (!inserted) return std::nullopt;
        nodes.push_back(std::move(rec));
        queue.push_back(it->second);
        return it->second;
    };

    // Locations index the completed automata (which include the sink).
    auto distinguishing = [&](int id) {
        return ca.accepting[nodes[id].la] != cb.accepting[nodes[id].lb];
    };

    auto concretize = [&](int id) {
        std::vector<int> path;
        for (int cur = id; cur != -1; cur = nodes[cur].parent) path.push_back(cur);
        std::reverse(path.begin(), path.end());
        TimedWord w;
        ClockValuation v(nclocks);
        for (int cur : path) {
            const NodeRec& rec = nodes[cur];
            if (rec.parent == -1) continue;  // root: no letter
            Rat t = pick_delay(rec.at_action, v, k);
            w.push_back({t, rec.action});
            v = v.elapsed(t).with_reset(rec.resets);
        }
        EquivCounterexample cex{w, ca.accepting[nodes[id].la]};
        if (a.member(w) != cex.accepted_by_first || b.member(w) == cex.accepted_by_first) {
            throw std::logic_error("region concretization: simulation disagrees");
        }
        return cex;
    };

    NodeRec root;
    root.la = ca.initial;
    root.lb = cb.initial;
    root.stable = initial_region(nclocks);
    int root_id = *make_node(std::move(root));
    if (distinguishing(root_id)) return concretize(root_id);

    constexpr size_t kNodeCap = 5'000'000;
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        // Delay closure from the node's stable region.
        std::vector<Region> chain{nodes[id].stable};
        while (true) {
            Region next = delay_successor(chain.back(), k);
            if (next == chain.back()) break;
            chain.push_back(std::move(next));
        }
        for (const Region& at : chain) {
            for (int act = 0; act < nact; ++act) {
                // The completed automata have exactly one enabled transition.
                const Transition* ta = nullptr;
                for (int ti : ca.outgoing(nodes[id].la, act)) {
                    if (region_satisfies(at, ca.transitions[ti].guard, 0)) {
                        ta = &ca.transitions[ti];
                        break;
                    }
                }
                const Transition* tb = nullptr;
                for (int ti : cb.outgoing(nodes[id].lb, act)) {
                    if (region_satisfies(at, cb.transitions[ti].guard, nact)) {
                        tb = &cb.transitions[ti];
                        break;
                    }
                }
                if (!ta || !tb) {
                    throw std::logic_error("equivalence: completed automaton blocks");
                }
                NodeRec rec;
                rec.parent = id;
                rec.action = act;
                rec.at_action = at;
                if (ta->reset) rec.resets.push_back(act);
                if (tb->reset) rec.resets.push_back(nact + act);
                rec.la = ta->target;
                rec.lb = tb->target;
                rec.stable = reset_clocks(at, rec.resets);
                auto created = make_node(std::move(rec));
                if (created && distinguishing(*created)) return concretize(*created);
                if (nodes.size() > kNodeCap) {
                    throw std::runtime_error("equivalence: region graph too large");
                }
            }
        }
    }
    return std::nullopt;
}

bool equivalent(const Rera& a, const Rera& b) { return !find_difference(a, b).has_value(); }

}  // namespace rerl
