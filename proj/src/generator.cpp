#include "rerl/generator.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace rerl {

int Rng::below(int n) {
    if (n <= 0) return 0;
    return static_cast<int>(raw() % static_cast<std::uint64_t>(n));
}

namespace {

std::vector<Guard> axis_cells(int clock, std::int64_t k, Rng& rng) {
    int want = rng.below(3);  // number of cuts
    std::set<std::int64_t> cut_set;
    for (int i = 0; i < want && k >= 1; ++i)
        cut_set.insert(1 + rng.below(static_cast<int>(k)));
    std::vector<std::int64_t> cuts(cut_set.begin(), cut_set.end());
    std::vector<bool> strict;  // true: border point belongs to the right cell
    strict.reserve(cuts.size());
    for (size_t i = 0; i < cuts.size(); ++i) strict.push_back(rng.flip());

    std::vector<Guard> cells;
    for (size_t i = 0; i <= cuts.size(); ++i) {
        std::vector<GuardAtom> atoms;
        if (i > 0)
            atoms.push_back({clock, strict[i - 1] ? Rel::Ge : Rel::Gt,
                             cuts[i - 1]});
        if (i < cuts.size())
            atoms.push_back({clock, strict[i] ? Rel::Lt : Rel::Le, cuts[i]});
        cells.push_back(Guard::from_atoms(atoms));
    }
    return cells;
}

}  // namespace

Rera random_rera(const GenParams& params, Rng& rng) {
    Rera a;
    std::vector<std::string> actions;
    for (int c = 0; c < params.alphabet_size; ++c)
        actions.push_back(std::string(1, static_cast<char>('a' + c)));
    a.alphabet = Alphabet(std::move(actions));
    for (int l = 0; l < params.locations; ++l)
        a.location_names.push_back("l" + std::to_string(l));
    a.initial = 0;
    a.max_constant = params.k;
    a.accepting.assign(params.locations, false);
    for (int l = 0; l < params.locations; ++l) a.accepting[l] = rng.flip();
    if (std::find(a.accepting.begin(), a.accepting.end(), true) ==
        a.accepting.end())
        a.accepting[params.locations - 1] = true;

    for (int l = 0; l < params.locations; ++l) {
        for (int c = 0; c < params.alphabet_size; ++c) {
            for (Guard cell : axis_cells(c, params.k, rng)) {
                if (rng.below(4) == 0) continue;  // blocking cell
                if (params.alphabet_size > 1 && rng.below(4) == 0) {
                    int other = rng.below(params.alphabet_size - 1);
                    if (other >= c) ++other;
                    std::int64_t m = rng.below(static_cast<int>(params.k) + 1);
                    cell = cell.conjoined(
                        {other, rng.flip() ? Rel::Le : Rel::Gt, m});
                }
                Transition t;
                t.source = l;
                t.action = c;
                t.guard = std::move(cell);
                t.reset = rng.flip();
                t.target = rng.below(params.locations);
                a.transitions.push_back(std::move(t));
            }
        }
    }
    a.validate();
    return a;
}

TimedWord random_word(const Alphabet& alphabet, std::int64_t k, size_t length,
                      Rng& rng) {
    TimedWord w;
    for (size_t i = 0; i < length; ++i) {
        TimedLetter letter;
        letter.action = rng.below(static_cast<int>(alphabet.size()));
        std::int64_t whole = rng.below(static_cast<int>(k) + 2);
        int quarter = rng.below(4);
        letter.delay = Rat(whole) + Rat(quarter, 4);
        w.push_back(std::move(letter));
    }
    return w;
}

}  // namespace rerl
