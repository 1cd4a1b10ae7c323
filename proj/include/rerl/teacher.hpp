#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "rerl/regions.hpp"
#include "rerl/rera.hpp"
#include "rerl/words.hpp"

namespace rerl {

// The oracle interface the learner talks to: membership of timed words and
// equivalence of hypothesis automata.
class Teacher {
  public:
    virtual ~Teacher() = default;
    virtual const Alphabet& alphabet() const = 0;
    virtual bool member(const TimedWord& w) = 0;
    // nullopt when the hypothesis matches; otherwise a counterexample
    // labeled with the target's verdict.
    virtual std::optional<EquivCounterexample> equivalence(const Rera& hypothesis) = 0;
};

// Teacher simulated from a known target automaton.  Membership answers are
// memoized; the distinct count is the number of words actually simulated.
class SimTeacher : public Teacher {
  public:
    explicit SimTeacher(Rera target);

    const Alphabet& alphabet() const override { return target_.alphabet; }
    bool member(const TimedWord& w) override;
    std::optional<EquivCounterexample> equivalence(const Rera& hypothesis) override;

    const Rera& target() const { return target_; }
    size_t membership_calls() const { return membership_calls_; }
    size_t distinct_membership_queries() const { return cache_.size(); }
    size_t equivalence_queries() const { return equivalence_queries_; }

  private:
    Rera target_;
    std::map<TimedWord, bool> cache_;
    size_t membership_calls_ = 0;
    size_t equivalence_queries_ = 0;
};

}  // namespace rerl
