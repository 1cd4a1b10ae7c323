#include "rerl/rera.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace rerl {

void Rera::validate() const {
    if (location_names.empty()) throw std::runtime_error("rera: no locations");
    std::set<std::string> names(location_names.begin(), location_names.end());
    if (names.size() != location_names.size()) {
        throw std::runtime_error("rera: duplicate location names");
    }
    if (initial < 0 || initial >= num_locations()) {
        throw std::runtime_error("rera: initial location out of range");
    }
    if (static_cast<int>(accepting.size()) != num_locations()) {
        throw std::runtime_error("rera: accepting flags size mismatch");
    }
    if (max_constant < 0) throw std::runtime_error("rera: negative max constant");
    for (const auto& t : transitions) {
        if (t.source < 0 || t.source >= num_locations() || t.target < 0 ||
            t.target >= num_locations()) {
            throw std::runtime_error("rera: transition endpoint out of range");
        }
        if (t.action < 0 || t.action >= alphabet.size()) {
            throw std::runtime_error("rera: transition action out of range");
        }
        if (t.guard.max_constant() > max_constant) {
            throw std::runtime_error("rera: guard constant above max constant");
        }
        for (const auto& a : t.guard.atoms()) {
            if (a.clock < 0 || a.clock >= num_clocks()) {
                throw std::runtime_error("rera: guard clock out of range");
            }
        }
    }
    for (int l = 0; l < num_locations(); ++l) {
        for (int a = 0; a < alphabet.size(); ++a) {
            auto out = outgoing(l, a);
            for (size_t i = 0; i < out.size(); ++i) {
                for (size_t j = i + 1; j < out.size(); ++j) {
                    if (!transitions[out[i]].guard.disjoint_with(transitions[out[j]].guard)) {
                        throw std::runtime_error(
                            "rera: overlapping guards from " + location_names[l] +
                            " on " + alphabet.action(a));
                    }
                }
            }
        }
    }
}

std::vector<int> Rera::outgoing(int source, int action) const {
    std::vector<int> out;
    for (size_t i = 0; i < transitions.size(); ++i) {
        if (transitions[i].source == source && transitions[i].action == action) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

std::optional<int> Rera::step(int source, int action, const ClockValuation& u) const {
    for (size_t i = 0; i < transitions.size(); ++i) {
        const Transition& t = transitions[i];
        if (t.source == source && t.action == action && t.guard.contains(u)) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

SimResult Rera::simulate(const TimedWord& w) const {
    SimResult res;
    int loc = initial;
    res.visited.push_back(loc);
    ClockValuation v(num_clocks());
    for (size_t i = 0; i < w.size(); ++i) {
        ClockValuation u = v.elapsed(w[i].delay);
        auto ti = step(loc, w[i].action, u);
        if (!ti) {
            res.blocked_at = i;
            res.accepted = false;
            return res;
        }
        const Transition& t = transitions[*ti];
        res.resets.push_back(t.reset);
        v = t.reset ? u.with_reset(w[i].action) : u;
        loc = t.target;
        res.visited.push_back(loc);
    }
    res.accepted = accepting[loc];
    return res;
}

bool Rera::member(const TimedWord& w) const { return simulate(w).accepted; }

Rera Rera::completed() const {
    Rera c(*this);
    int sink = c.num_locations();
    c.location_names.push_back("__sink");
    c.accepting.push_back(false);
    for (int l = 0; l < num_locations(); ++l) {
        for (int a = 0; a < alphabet.size(); ++a) {
            // Subtract every existing guard from the full clock space.
            std::vector<Guard> cells{Guard::top()};
            for (int ti : outgoing(l, a)) {
                std::vector<Guard> next;
                for (const auto& cell : cells) {
                    for (const auto& piece :
                         transitions[ti].guard.complement_cells(num_clocks())) {
                        Guard g = cell.conjoined(piece);
                        if (!g.is_empty()) next.push_back(g);
                    }
                }
                cells = std::move(next);
            }
            for (const auto& cell : cells) {
                c.transitions.push_back({l, a, cell, false, sink});
            }
        }
    }
    for (int a = 0; a < alphabet.size(); ++a) {
        c.transitions.push_back({sink, a, Guard::top(), false, sink});
    }
    return c;
}

std::string Rera::to_dot() const {
    std::ostringstream out;
    out << "digraph rera {\n  rankdir=LR;\n  node [shape=circle];\n";
    out << "  __start [shape=point, label=\"\"];\n";
    for (int l = 0; l < num_locations(); ++l) {
        out << "  \"" << location_names[l] << "\"";
        if (accepting[l]) out << " [shape=doublecircle]";
        out << ";\n";
    }
    out << "  __start -> \"" << location_names[initial] << "\";\n";
    for (const auto& t : transitions) {
        out << "  \"" << location_names[t.source] << "\" -> \""
            << location_names[t.target] << "\" [label=\""
            << alphabet.action(t.action) << ", " << t.guard.to_string(alphabet)
            << (t.reset ? ", reset" : "") << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace rerl
