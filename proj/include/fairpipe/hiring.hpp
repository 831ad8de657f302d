#ifndef FAIRPIPE_HIRING_HPP
#define FAIRPIPE_HIRING_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "fairpipe/errors.hpp"
#include "fairpipe/rational.hpp"
#include "fairpipe/rng.hpp"

namespace fairpipe {

enum class SamplingModel { Bernoulli, FixedQuota };

/// Two-stage selection funnel: interview quota out of an applicant pool,
/// hire quota out of the interview pool, with the minority boosted (or
/// suppressed) by a strict-equality slack at each stage. Only qualified
/// applicants are ever selected; qualification_rate scales the effective
/// pools.
struct HiringScenario {
    std::int64_t n_majority = 90;
    std::int64_t n_minority = 10;
    std::int64_t n_interview = 20;
    std::int64_t n_hire = 2;
    Rational eps = Rational(0);    // stage-1 slack, applied with equality
    Rational delta = Rational(0);  // stage-2 slack, applied with equality
    Rational qualification_rate = Rational(1);
    SamplingModel model = SamplingModel::Bernoulli;

    void validate() const {
        if (n_majority < 0 || n_minority < 0)
            throw SpecError("group sizes must be nonnegative");
        if (n_interview < 0 || n_hire < 0) throw SpecError("quotas must be nonnegative");
        if (n_interview > n_majority + n_minority)
            throw SpecError("interview quota exceeds the applicant pool");
        if (n_hire > n_interview) throw SpecError("hire quota exceeds the interview quota");
        if (!(eps > Rational(-1)) || !(delta > Rational(-1)))
            throw SpecError("stage slacks must be greater than -1");
        if (qualification_rate < 0 || qualification_rate > 1)
            throw SpecError("qualification rate must lie in [0, 1]");
    }
};

/// Per-group selection rates among qualified applicants.
struct GroupRates {
    Rational interview_majority;
    Rational interview_minority;
    Rational hire_majority;
    Rational hire_minority;
};

struct ExpectedOutcome {
    Rational interviewed_majority;
    Rational interviewed_minority;
    Rational hired_majority;
    Rational hired_minority;
};

namespace detail {

inline void require_rate(const Rational& rate, bool group_present, const char* constraint) {
    if (!group_present) return;  // a rate over an empty pool binds nothing
    if (rate < 0 || rate > 1)
        throw InfeasibleScenarioError(constraint, std::string("infeasible scenario: ") + constraint +
                                                      " (solved rate " + format_rational(rate) + ")");
}

struct SolvedScenario {
    GroupRates rates;
    ExpectedOutcome expected;
    Rational requested_minority_hires;  // before the [0,1] clamp check
    bool feasible = true;
    std::string binding_constraint;
};

/// Shared algebra for solve_rates and feasibility_check. Solves
///   interview: rate_min = (1+eps) * rate_maj, pools balanced to n_interview
///   hire:      rate_min = (1+delta) * rate_maj over the expected interview
///              pools, balanced to n_hire
/// and records instead of throwing when a rate leaves [0, 1].
inline SolvedScenario solve_scenario(const HiringScenario& s) {
    s.validate();
    SolvedScenario out;
    auto flag = [&](const Rational& rate, bool group_present, const char* constraint) {
        if (!group_present || (rate >= 0 && rate <= 1)) return;
        if (out.feasible) {
            out.feasible = false;
            out.binding_constraint = constraint;
        }
    };

    Rational pool_maj = Rational(s.n_majority) * s.qualification_rate;
    Rational pool_min = Rational(s.n_minority) * s.qualification_rate;

    Rational p_maj(0), p_min(0);
    if (s.n_interview > 0) {
        Rational denom = pool_maj + (Rational(1) + s.eps) * pool_min;
        if (denom == 0) {
            out.feasible = false;
            out.binding_constraint = "no qualified applicants to interview";
        } else {
            p_maj = Rational(s.n_interview) / denom;
            p_min = (Rational(1) + s.eps) * p_maj;
        }
    }
    flag(p_maj, pool_maj > 0, "majority interview rate outside [0,1]");
    flag(p_min, pool_min > 0, "minority interview rate outside [0,1]");

    Rational i_maj = pool_maj * p_maj;
    Rational i_min = pool_min * p_min;

    Rational h_maj(0), h_min(0);
    if (s.n_hire > 0) {
        Rational denom = i_maj + (Rational(1) + s.delta) * i_min;
        if (denom == 0) {
            out.feasible = false;
            out.binding_constraint = "no expected interviews to hire from";
        } else {
            h_maj = Rational(s.n_hire) / denom;
            h_min = (Rational(1) + s.delta) * h_maj;
        }
    }
    flag(h_maj, i_maj > 0, "majority hire rate outside [0,1]");
    flag(h_min, i_min > 0, "minority hire rate outside [0,1]");

    out.rates = GroupRates{p_maj, p_min, h_maj, h_min};
    out.expected = ExpectedOutcome{i_maj, i_min, i_maj * h_maj, i_min * h_min};
    out.requested_minority_hires = i_min * h_min;
    return out;
}

}  // namespace detail

/// Solves the per-group interview and hire rates that meet both quotas in
/// expectation with the scenario's slacks holding with equality. Throws
/// when any solved rate leaves [0, 1], naming the binding constraint.
inline GroupRates solve_rates(const HiringScenario& s) {
    detail::SolvedScenario solved = detail::solve_scenario(s);
    if (!solved.feasible)
        throw InfeasibleScenarioError(solved.binding_constraint,
                                      "infeasible scenario: " + solved.binding_constraint);
    return solved.rates;
}

/// Expected per-group interviewed and hired counts (group size x rate),
/// exact as rationals.
inline ExpectedOutcome expected_counts(const HiringScenario& s) {
    detail::SolvedScenario solved = detail::solve_scenario(s);
    if (!solved.feasible)
        throw InfeasibleScenarioError(solved.binding_constraint,
                                      "infeasible scenario: " + solved.binding_constraint);
    return solved.expected;
}

/// Reports whether the scenario's hire target is attainable: the minority
/// hire count can never exceed the expected minority interview pool, even
/// hiring every interviewed minority member.
struct FeasibilityReport {
    Rational max_minority_hires;        // expected minority interviewed
    Rational requested_minority_hires;  // what the delta target asks for
    bool feasible = true;
    std::string binding_constraint;  // empty when feasible
};

inline FeasibilityReport feasibility_check(const HiringScenario& s) {
    detail::SolvedScenario solved = detail::solve_scenario(s);
    FeasibilityReport report;
    report.max_minority_hires = solved.expected.interviewed_minority;
    report.requested_minority_hires = solved.requested_minority_hires;
    report.feasible = solved.feasible;
    report.binding_constraint = solved.binding_constraint;
    return report;
}

// -- Monte Carlo ---------------------------------------------------------------

/// Sample statistics for one count. Standard errors come from the sample
/// moments: se_mean = s/sqrt(n), and the variance's standard error uses the
/// fourth central moment, Var(s^2) ~= (m4 - m2^2 (n-3)/(n-1)) / n.
struct MomentStats {
    std::uint64_t n = 0;
    double mean = 0;
    double variance = 0;  // sample variance, n-1 denominator
    double se_mean = 0;
    double se_variance = 0;
};

namespace detail {

struct MomentAccumulator {
    std::uint64_t n = 0;
    std::uint64_t s1 = 0, s2 = 0, s3 = 0, s4 = 0;  // exact power sums

    void add(std::uint64_t x) {
        std::uint64_t x2 = x * x;
        n += 1;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
    }
    void merge(const MomentAccumulator& o) {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        s4 += o.s4;
    }

    MomentStats stats() const {
        MomentStats out;
        out.n = n;
        if (n == 0) return out;
        double dn = static_cast<double>(n);
        double mu = static_cast<double>(s1) / dn;
        double m2 = static_cast<double>(s2) / dn - mu * mu;
        double m3 = static_cast<double>(s3) / dn - 3 * mu * static_cast<double>(s2) / dn +
                    2 * mu * mu * mu;
        (void)m3;
        double m4 = static_cast<double>(s4) / dn - 4 * mu * static_cast<double>(s3) / dn +
                    6 * mu * mu * static_cast<double>(s2) / dn - 3 * mu * mu * mu * mu;
        out.mean = mu;
        out.variance = n > 1 ? m2 * dn / (dn - 1) : 0.0;
        out.se_mean = n > 1 ? std::sqrt(out.variance / dn) : 0.0;
        if (n > 1) {
            double var_of_var = (m4 - m2 * m2 * (dn - 3) / (dn - 1)) / dn;
            out.se_variance = std::sqrt(var_of_var > 0 ? var_of_var : 0.0);
        }
        return out;
    }
};

/// Rounds nonnegative real targets summing to an integer K into integer
/// counts with the same sum and exact per-group expectation: one uniform
/// offset u places marks at u, u+1, ..., and each group takes the marks
/// inside its cumulative segment. Every count lands in {floor, ceil} of
/// its target.
inline std::array<std::int64_t, 2> systematic_round(const std::array<double, 2>& targets,
                                                    SplitMix64& rng) {
    double u = rng.next_double();
    std::array<std::int64_t, 2> counts{0, 0};
    double lo = 0;
    for (std::size_t g = 0; g < 2; ++g) {
        double hi = lo + targets[g];
        // marks u + k in [lo, hi)
        std::int64_t first = static_cast<std::int64_t>(std::ceil(lo - u));
        if (u + static_cast<double>(first) < lo) ++first;
        std::int64_t last = static_cast<std::int64_t>(std::floor(hi - u));
        if (u + static_cast<double>(last) >= hi) --last;
        counts[g] = last >= first ? last - first + 1 : 0;
        lo = hi;
    }
    return counts;
}

/// Scales targets to sum to `quota` and clamps each at its capacity,
/// redistributing the clamped remainder over the groups still below cap.
inline std::array<double, 2> capped_targets(std::array<double, 2> weights,
                                            const std::array<std::int64_t, 2>& caps,
                                            std::int64_t quota) {
    std::array<double, 2> t{0, 0};
    std::array<bool, 2> clamped{false, false};
    double remaining = static_cast<double>(quota);
    for (int pass = 0; pass < 3; ++pass) {
        double w = 0;
        for (std::size_t g = 0; g < 2; ++g)
            if (!clamped[g]) w += weights[g];
        if (w <= 0) break;
        bool changed = false;
        for (std::size_t g = 0; g < 2; ++g) {
            if (clamped[g]) continue;
            t[g] = remaining * weights[g] / w;
            if (t[g] > static_cast<double>(caps[g])) {
                t[g] = static_cast<double>(caps[g]);
                clamped[g] = true;
                changed = true;
            }
        }
        if (!changed) break;
        remaining = static_cast<double>(quota);
        for (std::size_t g = 0; g < 2; ++g)
            if (clamped[g]) remaining -= t[g];
    }
    return t;
}

struct TrialCounts {
    std::array<std::int64_t, 2> interviewed{0, 0};
    std::array<std::int64_t, 2> hired{0, 0};
};

inline TrialCounts run_trial(const HiringScenario& s, const GroupRates& rates,
                             std::uint64_t seed, std::uint64_t trial) {
    SplitMix64 rng(derive_seed(seed, trial));
    const std::array<std::int64_t, 2> sizes{s.n_majority, s.n_minority};
    const std::array<double, 2> p{to_double(rates.interview_majority),
                                  to_double(rates.interview_minority)};
    const std::array<double, 2> h{to_double(rates.hire_majority), to_double(rates.hire_minority)};
    const double q = to_double(s.qualification_rate);

    TrialCounts counts;
    if (s.model == SamplingModel::Bernoulli) {
        // Independent per-applicant selection at the solved rates.
        for (std::size_t g = 0; g < 2; ++g) {
            for (std::int64_t i = 0; i < sizes[g]; ++i) {
                if (q < 1.0 && !rng.next_bernoulli(q)) continue;
                if (!rng.next_bernoulli(p[g])) continue;
                counts.interviewed[g] += 1;
                if (rng.next_bernoulli(h[g])) counts.hired[g] += 1;
            }
        }
        return counts;
    }

    // Fixed quotas: exactly n_interview interviews and n_hire hires per
    // trial (when enough candidates exist), drawn without replacement.
    // Group members are exchangeable, so the per-group counts carry the
    // whole distribution; individuals never need to be identified.
    std::array<std::int64_t, 2> qualified = sizes;
    if (q < 1.0)
        for (std::size_t g = 0; g < 2; ++g) {
            qualified[g] = 0;
            for (std::int64_t i = 0; i < sizes[g]; ++i)
                if (rng.next_bernoulli(q)) qualified[g] += 1;
        }

    std::int64_t interview_quota = std::min<std::int64_t>(s.n_interview, qualified[0] + qualified[1]);
    std::array<double, 2> iw{static_cast<double>(qualified[0]) * p[0],
                             static_cast<double>(qualified[1]) * p[1]};
    counts.interviewed = systematic_round(capped_targets(iw, qualified, interview_quota), rng);

    std::int64_t hire_quota =
        std::min<std::int64_t>(s.n_hire, counts.interviewed[0] + counts.interviewed[1]);
    std::array<double, 2> hw{static_cast<double>(counts.interviewed[0]) * h[0],
                             static_cast<double>(counts.interviewed[1]) * h[1]};
    counts.hired = systematic_round(capped_targets(hw, counts.interviewed, hire_quota), rng);
    return counts;
}

}  // namespace detail

struct MonteCarloResult {
    MomentStats interviewed_majority;
    MomentStats interviewed_minority;
    MomentStats hired_majority;
    MomentStats hired_minority;
};

/// Seeded trials of the scenario. Trial seeds derive from the trial index
/// alone and accumulators are exact integer sums, so any thread count
/// produces identical statistics.
inline MonteCarloResult monte_carlo(const HiringScenario& s, std::uint64_t trials,
                                    std::uint64_t seed, unsigned threads = 1) {
    if (trials < 1) throw PreconditionError("monte_carlo needs at least one trial");
    GroupRates rates = solve_rates(s);

    unsigned workers = threads == 0 ? 1 : threads;
    if (workers > trials) workers = static_cast<unsigned>(trials);

    struct Partial {
        detail::MomentAccumulator acc[4];
    };
    std::vector<Partial> partials(workers);
    auto work = [&](unsigned w) {
        std::uint64_t begin = trials * w / workers;
        std::uint64_t end = trials * (w + 1) / workers;
        for (std::uint64_t t = begin; t < end; ++t) {
            detail::TrialCounts c = detail::run_trial(s, rates, seed, t);
            partials[w].acc[0].add(static_cast<std::uint64_t>(c.interviewed[0]));
            partials[w].acc[1].add(static_cast<std::uint64_t>(c.interviewed[1]));
            partials[w].acc[2].add(static_cast<std::uint64_t>(c.hired[0]));
            partials[w].acc[3].add(static_cast<std::uint64_t>(c.hired[1]));
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    detail::MomentAccumulator totals[4];
    for (const Partial& p : partials)
        for (int i = 0; i < 4; ++i) totals[i].merge(p.acc[i]);
    return MonteCarloResult{totals[0].stats(), totals[1].stats(), totals[2].stats(),
                            totals[3].stats()};
}

}  // namespace fairpipe

#endif  // FAIRPIPE_HIRING_HPP
