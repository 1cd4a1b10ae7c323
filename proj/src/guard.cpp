#include "rerl/guard.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace rerl {

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

Alphabet::Alphabet(std::vector<std::string> actions) : actions_(std::move(actions)) {
    std::sort(actions_.begin(), actions_.end());
    auto last = std::unique(actions_.begin(), actions_.end());
    actions_.erase(last, actions_.end());
    for (const auto& a : actions_) {
        if (a.empty()) throw std::runtime_error("alphabet: empty action name");
    }
}

std::optional<int> Alphabet::index_of(const std::string& action) const {
    auto it = std::lower_bound(actions_.begin(), actions_.end(), action);
    if (it == actions_.end() || *it != action) return std::nullopt;
    return static_cast<int>(it - actions_.begin());
}

std::optional<int> Alphabet::clock_index(const std::string& clock) const {
    if (clock.size() < 3 || clock.compare(0, 2, "x_") != 0) return std::nullopt;
    return index_of(clock.substr(2));
}

// ---------------------------------------------------------------------------
// ClockValuation
// ---------------------------------------------------------------------------

ClockValuation ClockValuation::elapsed(const Rat& delta) const {
    if (delta < 0) throw std::runtime_error("elapsed: negative delay");
    ClockValuation r(*this);
    for (auto& v : r.values_) v += delta;
    return r;
}

ClockValuation ClockValuation::with_reset(const std::vector<int>& clocks) const {
    ClockValuation r(*this);
    for (int c : clocks) r.values_.at(c) = 0;
    return r;
}

ClockValuation ClockValuation::with_reset(int clock) const {
    return with_reset(std::vector<int>{clock});
}

std::string ClockValuation::to_string(const Alphabet& sigma) const {
    std::string s = "{";
    for (int i = 0; i < size(); ++i) {
        if (i) s += ", ";
        s += sigma.clock_name(i) + "=" + rat_to_string(values_[i]);
    }
    return s + "}";
}

// ---------------------------------------------------------------------------
// Guard
// ---------------------------------------------------------------------------

std::string rel_to_string(Rel r) {
    switch (r) {
        case Rel::Lt: return "<";
        case Rel::Le: return "<=";
        case Rel::Eq: return "=";
        case Rel::Ge: return ">=";
        case Rel::Gt: return ">";
    }
    throw std::runtime_error("rel_to_string: bad relation");
}

std::optional<Rel> rel_from_string(const std::string& s) {
    if (s == "<") return Rel::Lt;
    if (s == "<=") return Rel::Le;
    if (s == "=" || s == "==") return Rel::Eq;
    if (s == ">=") return Rel::Ge;
    if (s == ">") return Rel::Gt;
    return std::nullopt;
}

Guard Guard::bottom() {
    Guard g;
    g.empty_ = true;
    return g;
}

Guard Guard::from_atoms(const std::vector<GuardAtom>& atoms) {
    Guard g;
    for (const auto& a : atoms) g = g.conjoined(a);
    return g;
}

bool Guard::is_top() const { return !empty_ && bounds_.empty(); }

namespace {
// Lower bound (c, strict) is trivial when it is x >= 0.
bool lower_trivial(const Guard::Bounds& b) {
    return b.lower == 0 && !b.lower_strict;
}
// Whether the bounds admit no value.
bool bounds_empty(const Guard::Bounds& b) {
    if (!b.upper) return false;
    if (b.lower < *b.upper) return false;
    if (b.lower > *b.upper) return true;
    return b.lower_strict || b.upper_strict;  // equal constants
}
}  // namespace

Guard Guard::conjoined(const GuardAtom& atom) const {
    if (empty_) return *this;
    if (atom.constant < 0) throw std::runtime_error("guard: negative constant");
    Guard g(*this);
    Bounds b = g.bounds(atom.clock);
    switch (atom.rel) {
        case Rel::Lt:
            if (!b.upper || atom.constant < *b.upper ||
                (atom.constant == *b.upper && !b.upper_strict)) {
                b.upper = atom.constant;
                b.upper_strict = true;
            }
            break;
        case Rel::Le:
            if (!b.upper || atom.constant < *b.upper) {
                b.upper = atom.constant;
                b.upper_strict = false;
            }
            break;
        case Rel::Ge:
            if (atom.constant > b.lower) {
                b.lower = atom.constant;
                b.lower_strict = false;
            }
            break;
        case Rel::Gt:
            if (atom.constant > b.lower || (atom.constant == b.lower && !b.lower_strict)) {
                b.lower = atom.constant;
                b.lower_strict = true;
            }
            break;
        case Rel::Eq:
            return g.conjoined({atom.clock, Rel::Ge, atom.constant})
                .conjoined({atom.clock, Rel::Le, atom.constant});
    }
    if (bounds_empty(b)) return bottom();
    if (lower_trivial(b) && !b.upper) {
        g.bounds_.erase(atom.clock);
    } else {
        g.bounds_[atom.clock] = b;
    }
    return g;
}

Guard Guard::conjoined(const Guard& o) const {
    if (empty_ || o.empty_) return bottom();
    Guard g(*this);
    for (const auto& [clock, b] : o.bounds_) {
        if (!lower_trivial(b)) {
            g = g.conjoined({clock, b.lower_strict ? Rel::Gt : Rel::Ge, b.lower});
        }
        if (b.upper) {
            g = g.conjoined({clock, b.upper_strict ? Rel::Lt : Rel::Le, *b.upper});
        }
        if (g.empty_) return g;
    }
    return g;
}

std::vector<Guard> Guard::complement_cells(int num_clocks) const {
    // Complement of a box as disjoint cells: peel one violated bound per
    // clock while requiring earlier clocks to satisfy their bounds.
    if (empty_) return {Guard::top()};
    std::vector<Guard> cells;
    Guard prefix = Guard::top();  // earlier clocks constrained to satisfy
    for (int c = 0; c < num_clocks; ++c) {
        Bounds b = bounds(c);
        if (!lower_trivial(b)) {
            // violate the lower bound: x < lower (or <= when strict)
            Guard cell = prefix.conjoined({c, b.lower_strict ? Rel::Le : Rel::Lt, b.lower});
            if (!cell.is_empty()) cells.push_back(cell);
        }
        if (b.upper) {
            Guard cell = prefix.conjoined({c, b.upper_strict ? Rel::Ge : Rel::Gt, *b.upper});
            if (!cell.is_empty()) cells.push_back(cell);
        }
        // require clock c to satisfy its bounds from here on
        if (!lower_trivial(b)) {
            prefix = prefix.conjoined({c, b.lower_strict ? Rel::Gt : Rel::Ge, b.lower});
        }
        if (b.upper) {
            prefix = prefix.conjoined({c, b.upper_strict ? Rel::Lt : Rel::Le, *b.upper});
        }
    }
    return cells;
}

bool Guard::contains(const ClockValuation& v) const {
    if (empty_) return false;
    for (const auto& [clock, b] : bounds_) {
        const Rat& x = v[clock];
        if (b.lower_strict ? !(x > b.lower) : !(x >= b.lower)) return false;
        if (b.upper) {
            if (b.upper_strict ? !(x < *b.upper) : !(x <= *b.upper)) return false;
        }
    }
    return true;
}

bool Guard::subset_of(const Guard& o) const {
    if (empty_) return true;
    if (o.empty_) return false;
    for (const auto& [clock, ob] : o.bounds_) {
        Bounds b = bounds(clock);
        // our lower bound must be at least as strong
        if (b.lower < ob.lower) return false;
        if (b.lower == ob.lower && ob.lower_strict && !b.lower_strict) return false;
        if (ob.upper) {
            if (!b.upper) return false;
            if (*b.upper > *ob.upper) return false;
            if (*b.upper == *ob.upper && ob.upper_strict && !b.upper_strict) return false;
        }
    }
    return true;
}

bool Guard::disjoint_with(const Guard& o) const {
    return conjoined(o).is_empty();
}

std::int64_t Guard::max_constant() const {
    std::int64_t m = 0;
    for (const auto& [clock, b] : bounds_) {
        m = std::max(m, b.lower);
        if (b.upper) m = std::max(m, *b.upper);
    }
    return m;
}

Guard::Bounds Guard::bounds(int clock) const {
    auto it = bounds_.find(clock);
    if (it == bounds_.end()) return Bounds{};
    return it->second;
}

std::vector<GuardAtom> Guard::atoms() const {
    std::vector<GuardAtom> out;
    for (const auto& [clock, b] : bounds_) {
        if (b.upper && !b.upper_strict && !b.lower_strict && b.lower == *b.upper) {
            out.push_back({clock, Rel::Eq, b.lower});
            continue;
        }
        if (!lower_trivial(b)) {
            out.push_back({clock, b.lower_strict ? Rel::Gt : Rel::Ge, b.lower});
        }
        if (b.upper) {
            out.push_back({clock, b.upper_strict ? Rel::Lt : Rel::Le, *b.upper});
        }
    }
    return out;
}

bool Guard::operator==(const Guard& o) const {
    return empty_ == o.empty_ && bounds_ == o.bounds_;
}

bool Guard::operator<(const Guard& o) const {
    if (empty_ != o.empty_) return empty_ < o.empty_;
    return std::lexicographical_compare(
        bounds_.begin(), bounds_.end(), o.bounds_.begin(), o.bounds_.end());
}

std::string Guard::to_string(const Alphabet& sigma) const {
    if (empty_) return "false";
    if (bounds_.empty()) return "true";
    std::string s;
    for (const auto& a : atoms()) {
        if (!s.empty()) s += " & ";
        s += sigma.clock_name(a.clock) + rel_to_string(a.rel) + std::to_string(a.constant);
    }
    return s;
}

// ---------------------------------------------------------------------------
// ClassAtom / KClass
// ---------------------------------------------------------------------------

ClassAtom ClassAtom::of(const Rat& value, std::int64_t k) {
    if (value < 0) throw std::runtime_error("class: negative value");
    if (value > k) return above();
    Int fl = floor_rat(value);
    auto n = fl.convert_to<std::int64_t>();
    if (is_integer(value)) return point(n);
    return open(n);
}

bool ClassAtom::contains(const Rat& value, std::int64_t k) const {
    switch (kind) {
        case Point: return value == n;
        case Open: return value > n && value < n + 1;
        case AboveK: return value > k;
    }
    return false;
}

bool ClassAtom::satisfies(Rel rel, std::int64_t constant, std::int64_t k) const {
    // Pick a representative: classes are atomic w.r.t. integer comparisons
    // with constants <= K, so one representative decides the whole class.
    switch (kind) {
        case Point:
            switch (rel) {
                case Rel::Lt: return n < constant;
                case Rel::Le: return n <= constant;
                case Rel::Eq: return n == constant;
                case Rel::Ge: return n >= constant;
                case Rel::Gt: return n > constant;
            }
            break;
        case Open:
            // representative in (n, n+1)
            switch (rel) {
                case Rel::Lt: return n + 1 <= constant;
                case Rel::Le: return n + 1 <= constant;
                case Rel::Eq: return false;
                case Rel::Ge: return n >= constant;
                case Rel::Gt: return n >= constant;
            }
            break;
        case AboveK:
            switch (rel) {
                case Rel::Lt: return false;
                case Rel::Le: return false;
                case Rel::Eq: return false;
                case Rel::Ge: return constant <= k;
                case Rel::Gt: return constant <= k;
            }
            break;
    }
    return false;
}

std::string ClassAtom::to_string() const {
    switch (kind) {
        case Point: return "[" + std::to_string(n) + "]";
        case Open: return "(" + std::to_string(n) + "," + std::to_string(n + 1) + ")";
        case AboveK: return ">K";
    }
    return "?";
}

KClass KClass::of(const ClockValuation& v, std::int64_t k) {
    std::vector<ClassAtom> atoms;
    atoms.reserve(v.size());
    for (int i = 0; i < v.size(); ++i) atoms.push_back(ClassAtom::of(v[i], k));
    return KClass(std::move(atoms), k);
}

bool KClass::contains(const ClockValuation& v) const {
    if (v.size() != size()) return false;
    for (int i = 0; i < size(); ++i) {
        if (!per_clock_[i].contains(v[i], k_)) return false;
    }
    return true;
}

bool KClass::satisfies(const Guard& g) const {
    if (g.is_empty()) return false;
    for (const auto& a : g.atoms()) {
        if (a.clock >= size()) return false;
        if (!per_clock_[a.clock].satisfies(a.rel, a.constant, k_)) return false;
    }
    return true;
}

KClass KClass::with_reset(int clock) const {
    KClass r(*this);
    r.per_clock_.at(clock) = ClassAtom::point(0);
    return r;
}

std::string KClass::to_string(const Alphabet& sigma) const {
    std::string s = "{";
    for (int i = 0; i < size(); ++i) {
        if (i) s += ", ";
        s += sigma.clock_name(i) + ":" + per_clock_[i].to_string();
    }
    return s + "}";
}

bool k_equivalent(const Rat& x, const Rat& y, std::int64_t k) {
    if (x > k && y > k) return true;
    bool xi = is_integer(x), yi = is_integer(y);
    if (xi != yi) return false;
    if (xi) return x == y;
    return floor_rat(x) == floor_rat(y);
}

bool k_equivalent(const ClockValuation& v, const ClockValuation& w, std::int64_t k) {
    if (v.size() != w.size()) return false;
    for (int i = 0; i < v.size(); ++i) {
        if (!k_equivalent(v[i], w[i], k)) return false;
    }
    return true;
}

}  // namespace rerl
