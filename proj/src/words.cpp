#include "rerl/words.hpp"

#include <sstream>
#include <stdexcept>

namespace rerl {

TimedWord strip_resets(const TimedWordWithResets& w) {
    TimedWord out;
    out.reserve(w.size());
    for (const auto& l : w) out.push_back({l.delay, l.action});
    return out;
}

TimedWordWithResets with_resets(const TimedWord& w, const std::vector<bool>& resets) {
    if (w.size() != resets.size()) {
        throw std::runtime_error("with_resets: length mismatch");
    }
    TimedWordWithResets out;
    out.reserve(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        out.push_back({w[i].delay, w[i].action, resets[i]});
    }
    return out;
}

std::vector<RunStep> run_of(const TimedWordWithResets& w, int num_clocks) {
    std::vector<RunStep> run;
    run.reserve(w.size());
    ClockValuation v(num_clocks);
    for (const auto& l : w) {
        ClockValuation u = v.elapsed(l.delay);
        run.push_back({v, u});
        v = l.reset ? u.with_reset(l.action) : u;
    }
    return run;
}

bool satisfies(const TimedWordWithResets& w, const GuardedWordWithResets& g,
               int num_clocks) {
    if (w.size() != g.size()) return false;
    auto run = run_of(w, num_clocks);
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i].action != g[i].action || w[i].reset != g[i].reset) return false;
        if (!g[i].guard.contains(run[i].at_action)) return false;
    }
    return true;
}

std::vector<Zone> zone_states_of(const GuardedWordWithResets& g, int num_clocks) {
    std::vector<Zone> zones;
    zones.reserve(g.size() + 1);
    zones.push_back(Zone::zero_point(num_clocks).future());
    for (const auto& l : g) {
        Zone z = zones.back().conjoined(l.guard);
        if (l.reset) z = z.with_reset(l.action);
        zones.push_back(z.future());
    }
    return zones;
}

KClosedWord k_closed_word_of(const TimedWordWithResets& w, int num_clocks,
                             std::int64_t k) {
    KClosedWord out;
    out.reserve(w.size());
    auto run = run_of(w, num_clocks);
    for (size_t i = 0; i < w.size(); ++i) {
        out.push_back({KClass::of(run[i].at_action, k), w[i].action, w[i].reset});
    }
    return out;
}

bool models(const TimedWordWithResets& w, const KClosedWord& kw, int num_clocks) {
    if (w.size() != kw.size()) return false;
    auto run = run_of(w, num_clocks);
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i].action != kw[i].action || w[i].reset != kw[i].reset) return false;
        if (!kw[i].at_action.contains(run[i].at_action)) return false;
    }
    return true;
}

TimedWord lambda_sum(const Rat& lambda, const TimedWord& w1, const TimedWord& w2) {
    if (w1.size() != w2.size()) throw std::runtime_error("lambda_sum: length mismatch");
    TimedWord out;
    out.reserve(w1.size());
    for (size_t i = 0; i < w1.size(); ++i) {
        if (w1[i].action != w2[i].action) {
            throw std::runtime_error("lambda_sum: action mismatch");
        }
        out.push_back({lambda * w1[i].delay + (1 - lambda) * w2[i].delay, w1[i].action});
    }
    return out;
}

TimedWord splice(const TimedWord& w1, const TimedWord& w2) {
    if (w1.size() > w2.size()) throw std::runtime_error("splice: first word longer");
    TimedWord out;
    out.reserve(w2.size());
    for (size_t i = 0; i < w1.size(); ++i) {
        if (w1[i].action != w2[i].action) {
            throw std::runtime_error("splice: action mismatch");
        }
        out.push_back({Rat(floor_rat(w1[i].delay)) + frac_rat(w2[i].delay), w1[i].action});
    }
    for (size_t i = w1.size(); i < w2.size(); ++i) out.push_back(w2[i]);
    return out;
}

std::string format_timed_word(const TimedWord& w, const Alphabet& sigma) {
    std::string s;
    for (const auto& l : w) {
        if (!s.empty()) s += " ";
        s += rat_to_string(l.delay) + ":" + sigma.action(l.action);
    }
    return s;
}

std::optional<TimedWord> parse_timed_word(const std::string& text, const Alphabet& sigma) {
    TimedWord out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        auto colon = tok.rfind(':');
        if (colon == std::string::npos) return std::nullopt;
        auto delay = parse_rat(tok.substr(0, colon));
        auto action = sigma.index_of(tok.substr(colon + 1));
        if (!delay || *delay < 0 || !action) return std::nullopt;
        out.push_back({*delay, *action});
    }
    return out;
}

std::string format_reset_word(const TimedWordWithResets& w, const Alphabet& sigma) {
    std::string s;
    for (const auto& l : w) {
        if (!s.empty()) s += " ";
        s += rat_to_string(l.delay) + ":" + sigma.action(l.action) + (l.reset ? "!" : "");
    }
    return s;
}

}  // namespace rerl
