#include "rerl/zone.hpp"

#include <stdexcept>

namespace rerl {

namespace {

using Bound = Zone::Bound;

// b1 strictly tighter than b2?
bool tighter(const Bound& b1, const Bound& b2) {
    if (b2.inf) return !b1.inf;
    if (b1.inf) return false;
    if (b1.value != b2.value) return b1.value < b2.value;
    return b1.strict && !b2.strict;
}

Bound bound_min(const Bound& b1, const Bound& b2) { return tighter(b1, b2) ? b1 : b2; }

Bound bound_add(const Bound& b1, const Bound& b2) {
    if (b1.inf || b2.inf) return Bound::infinite();
    return Bound::of(b1.value + b2.value, b1.strict || b2.strict);
}

// Does difference value d satisfy the bound (d <= / < value)?
bool bound_holds(const Rat& d, const Bound& b) {
    if (b.inf) return true;
    return b.strict ? d < b.value : d <= b.value;
}

}  // namespace

bool Zone::Bound::operator==(const Bound& o) const {
    if (inf || o.inf) return inf == o.inf;
    return value == o.value && strict == o.strict;
}

Zone::Zone(int num_clocks) : n_(num_clocks) {
    d_.assign(static_cast<size_t>(n_ + 1) * (n_ + 1), Bound::infinite());
    for (int i = 0; i <= n_; ++i) at(i, i) = Bound::of(Rat(0), false);
}

Zone Zone::zero_point(int num_clocks) {
    Zone z(num_clocks);
    for (int i = 0; i <= num_clocks; ++i) {
        for (int j = 0; j <= num_clocks; ++j) z.at(i, j) = Bound::of(Rat(0), false);
    }
    return z;
}

Zone Zone::universal(int num_clocks) {
    Zone z(num_clocks);
    for (int i = 1; i <= num_clocks; ++i) z.at(0, i) = Bound::of(Rat(0), false);
    return z;
}

void Zone::canonicalize() {
    if (empty_) return;
    for (int k = 0; k <= n_; ++k) {
        for (int i = 0; i <= n_; ++i) {
            for (int j = 0; j <= n_; ++j) {
                at(i, j) = bound_min(at(i, j), bound_add(at(i, k), at(k, j)));
            }
        }
    }
    for (int i = 0; i <= n_; ++i) {
        if (tighter(at(i, i), Bound::of(Rat(0), false))) {
            empty_ = true;
            return;
        }
    }
}

Zone Zone::future() const {
    if (empty_) return *this;
    Zone z(*this);
    for (int i = 1; i <= n_; ++i) z.at(i, 0) = Bound::infinite();
    z.canonicalize();
    return z;
}

Zone Zone::with_reset(int clock) const {
    if (empty_) return *this;
    Zone z(*this);
    int v = clock + 1;
    for (int j = 0; j <= n_; ++j) {
        z.at(v, j) = z.at(0, j);
        z.at(j, v) = z.at(j, 0);
    }
    z.at(v, v) = Bound::of(Rat(0), false);
    z.canonicalize();
    return z;
}

Zone Zone::conjoined_diff(int i, int j, Rel rel, const Rat& constant) const {
    if (empty_) return *this;
    int vi = i + 1, vj = j + 1;
    Zone z(*this);
    switch (rel) {
        case Rel::Lt:
            z.at(vi, vj) = bound_min(z.at(vi, vj), Bound::of(constant, true));
            break;
        case Rel::Le:
            z.at(vi, vj) = bound_min(z.at(vi, vj), Bound::of(constant, false));
            break;
        case Rel::Gt:
            z.at(vj, vi) = bound_min(z.at(vj, vi), Bound::of(-constant, true));
            break;
        case Rel::Ge:
            z.at(vj, vi) = bound_min(z.at(vj, vi), Bound::of(-constant, false));
            break;
        case Rel::Eq:
            z.at(vi, vj) = bound_min(z.at(vi, vj), Bound::of(constant, false));
            z.at(vj, vi) = bound_min(z.at(vj, vi), Bound::of(-constant, false));
            break;
    }
    z.canonicalize();
    return z;
}

Zone Zone::conjoined(int clock, Rel rel, const Rat& constant) const {
    return conjoined_diff(clock, -1, rel, constant);
}

Zone Zone::conjoined(const Guard& g) const {
    if (g.is_empty()) {
        Zone z(*this);
        z.empty_ = true;
        return z;
    }
    Zone z(*this);
    for (const auto& a : g.atoms()) {
        z = z.conjoined(a.clock, a.rel, Rat(a.constant));
        if (z.empty_) break;
    }
    return z;
}

Zone Zone::conjoined(const KClass& cls) const {
    Zone z(*this);
    for (int c = 0; c < cls.size() && !z.empty_; ++c) {
        const ClassAtom& a = cls.atom(c);
        switch (a.kind) {
            case ClassAtom::Point:
                z = z.conjoined(c, Rel::Eq, Rat(a.n));
                break;
            case ClassAtom::Open:
                z = z.conjoined(c, Rel::Gt, Rat(a.n)).conjoined(c, Rel::Lt, Rat(a.n + 1));
                break;
            case ClassAtom::AboveK:
                z = z.conjoined(c, Rel::Gt, Rat(cls.k()));
                break;
        }
    }
    return z;
}

bool Zone::contains(const ClockValuation& v) const {
    if (empty_) return false;
    auto value = [&](int var) { return var == 0 ? Rat(0) : v[var - 1]; };
    for (int i = 0; i <= n_; ++i) {
        for (int j = 0; j <= n_; ++j) {
            if (!bound_holds(value(i) - value(j), at(i, j))) return false;
        }
    }
    return true;
}

std::optional<ClockValuation> Zone::sample() const {
    if (empty_) return std::nullopt;
    Zone z(*this);
    std::vector<Rat> vals(n_);
    for (int c = 0; c < n_; ++c) {
        const Bound& ub = z.at(c + 1, 0);       // x_c <= value
        const Bound& lbr = z.at(0, c + 1);      // -x_c <= value, so x_c >= -value
        Rat lo = -lbr.value;
        Rat v;
        if (ub.inf) {
            v = lo + Rat(1, 2);
        } else if (lo == ub.value) {
            v = lo;
        } else {
            v = (lo + ub.value) / 2;
        }
        vals[c] = v;
        z = z.conjoined(c, Rel::Eq, v);
        if (z.empty_) return std::nullopt;
    }
    return ClockValuation(std::move(vals));
}

bool Zone::operator==(const Zone& o) const {
    if (n_ != o.n_) return false;
    if (empty_ || o.empty_) return empty_ == o.empty_;
    return d_ == o.d_;
}

std::string Zone::to_string(const Alphabet& sigma) const {
    if (empty_) return "empty";
    auto name = [&](int var) { return var == 0 ? std::string("0") : sigma.clock_name(var - 1); };
    std::string s;
    for (int i = 0; i <= n_; ++i) {
        for (int j = 0; j <= n_; ++j) {
            if (i == j || at(i, j).inf) continue;
            if (!s.empty()) s += " & ";
            s += name(i) + "-" + name(j) + (at(i, j).strict ? "<" : "<=") +
                 rat_to_string(at(i, j).value);
        }
    }
    return s.empty() ? "true" : s;
}

}  // namespace rerl
