#ifndef FAIRPIPE_COMPOSITION_HPP
#define FAIRPIPE_COMPOSITION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fairpipe/distribution.hpp"
#include "fairpipe/errors.hpp"
#include "fairpipe/metrics.hpp"
#include "fairpipe/rational.hpp"
#include "fairpipe/rng.hpp"

namespace fairpipe {

/// Whole-pipeline slack implied by per-stage slacks: (1+eps)(1+delta) - 1.
template <class T>
T compose_slack(const T& eps, const T& delta) {
    if (!(eps > T(-1)) || !(delta > T(-1)))
        throw PreconditionError("stage slacks must be greater than -1");
    return (T(1) + eps) * (T(1) + delta) - T(1);
}

/// Result of checking the multiplicative bound on one distribution.
/// assumptions_hold: [0] stage-1 cross rates defined, [1] stage-2
/// conditional rates defined, [2] no mass on (pos2 and not pos1).
/// verdict is set only when all three hold.
template <class T>
struct CompositionReport {
    std::string group;
    std::optional<T> eps;    // stage-1 cross slack
    std::optional<T> delta;  // stage-2 conditional slack
    std::optional<T> alpha;  // final-decision slack w.r.t. stage-2 truth
    std::optional<T> bound;  // (1+eps)(1+delta) - 1
    std::array<bool, 3> assumptions_hold{false, false, false};
    std::optional<bool> verdict;  // alpha >= bound
    T leak_mass = T(0);           // Pr{pos2 and not pos1}, nonzero iff [2] fails

    bool all_assumptions_hold() const {
        return assumptions_hold[0] && assumptions_hold[1] && assumptions_hold[2];
    }
};

/// Measures eps, delta and alpha on an exact distribution and checks
/// alpha >= (1+eps)(1+delta) - 1. Under the filtering assumption the chain
/// of conditionals makes this an identity, so any violation is an
/// arithmetic bug, not a modeling surprise.
template <class T>
CompositionReport<T> verify_composition(const JointDistribution<T>& dist, std::size_t group) {
    CompositionReport<T> report;
    report.group = dist.groups().label(group);

    report.leak_mass = dist.mass_where([](const Cell& c) { return c.pos2 && !c.pos1; });
    report.assumptions_hold[2] = ScalarTraits<T>::is_zero(report.leak_mass);

    try {
        report.eps = stage1_cross_slack(dist, group);
        report.assumptions_hold[0] = true;
    } catch (const Error&) {
        report.assumptions_hold[0] = false;
    }
    try {
        report.delta = stage2_conditional_slack(dist, group);
        report.assumptions_hold[1] = true;
    } catch (const Error&) {
        report.assumptions_hold[1] = false;
    }
    try {
        report.alpha = epsilon_slack(dist, Stage::Two, Stage::Two, group);
    } catch (const Error&) {
        report.alpha.reset();
    }

    if (report.eps && report.delta) report.bound = compose_slack(*report.eps, *report.delta);
    if (report.all_assumptions_hold() && report.alpha && report.bound)
        report.verdict = *report.alpha >= *report.bound - ScalarTraits<T>::verdict_tolerance();
    return report;
}

template <class T>
CompositionReport<T> verify_composition(const JointDistribution<T>& dist,
                                        std::string_view group) {
    return verify_composition(dist, dist.groups().index_of(group));
}

/// One report per non-majority group, label order.
template <class T>
std::vector<CompositionReport<T>> verify_composition_all(const JointDistribution<T>& dist) {
    std::vector<CompositionReport<T>> out;
    for (std::size_t g : dist.groups().minority_indices())
        out.push_back(verify_composition(dist, g));
    return out;
}

// -- Random distributions -----------------------------------------------------

struct DistributionGenOptions {
    /// Move all (pos1=0, pos2=1) mass to (pos1=0, pos2=0) so the table is
    /// consistent with a filtering pipeline.
    bool filtering = true;
    /// Zero every cell with truth1 != truth2.
    bool force_truths_equal = false;
    /// Cell weights are integers in [0, resolution].
    std::uint32_t resolution = 1000;
};

/// Random rational-mass table: every cell weight uniform in [0, resolution],
/// normalized over the sum. With `filtering` set, leaking mass is folded
/// into the stage-2-negative cell of the same (group, truths) slice.
inline JointDistribution<Rational> random_rational_distribution(
    SplitMix64& rng, const GroupSet& groups, const DistributionGenOptions& opts = {}) {
    std::vector<Rational> weights(groups.size() * 16, Rational(0));
    BigInt total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int t1 = 0; t1 < 2; ++t1)
            for (int t2 = 0; t2 < 2; ++t2)
                for (int p1 = 0; p1 < 2; ++p1)
                    for (int p2 = 0; p2 < 2; ++p2) {
                        std::uint64_t w = rng.next_below(opts.resolution + 1);
                        if (opts.force_truths_equal && t1 != t2) w = 0;
                        std::size_t i = JointDistribution<Rational>::index_of(g, t1, t2, p1, p2);
                        weights[i] = Rational(w);
                        total += w;
                    }
    if (total == 0) weights[0] = Rational(1);
    if (opts.filtering) {
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2) {
                    std::size_t leak = JointDistribution<Rational>::index_of(g, t1, t2, false, true);
                    std::size_t sink = JointDistribution<Rational>::index_of(g, t1, t2, false, false);
                    weights[sink] += weights[leak];
                    weights[leak] = Rational(0);
                }
    }
    return JointDistribution<Rational>::normalized(groups, std::move(weights));
}

// -- Counterexample search ----------------------------------------------------

/// A distribution whose stage decisions look fair in isolation (stage-1
/// slack against its own truth is exactly zero, stage-2 conditional slack
/// is exactly zero) while the whole pipeline disadvantages the group.
struct Counterexample {
    JointDistribution<Rational> dist;
    Rational naive_stage1_slack;  // slack of pos1 w.r.t. truth1
    Rational delta;               // stage-2 conditional slack
    Rational alpha;               // pipeline slack
    std::uint64_t trial_index;
};

struct CounterexampleSearchOptions {
    /// Accept only pipelines at least this unfair: alpha <= -min_violation
    /// (with min_violation = 0, any alpha < 0 is accepted).
    Rational min_violation = Rational(0);
    bool force_truths_equal = false;
    unsigned threads = 1;
    std::uint32_t resolution = 1000;
};

namespace detail {

inline std::size_t first_minority(const GroupSet& groups) {
    return groups.minority_indices().front();
}

/// Builds a trial distribution in which the stage-1 decision depends only
/// on the stage-1 truth and the stage-2 decision only on (stage-1 decision,
/// stage-2 truth). Both per-stage slacks are then exactly zero by
/// construction; group disadvantage can enter only through the truths'
/// joint, i.e. through stage-2-qualified members sitting at truth1 = 0.
inline std::optional<Counterexample> counterexample_trial(
    std::uint64_t seed, std::uint64_t trial, const GroupSet& groups,
    const CounterexampleSearchOptions& opts) {
    SplitMix64 rng(derive_seed(seed, trial));
    const std::uint64_t R = opts.resolution;

    // Joint of the two truths per group, as integer weights.
    std::vector<std::array<std::uint64_t, 4>> truth_weights(groups.size());
    for (auto& w : truth_weights)
        for (std::size_t i = 0; i < 4; ++i) {
            w[i] = rng.next_below(R + 1);
            if (opts.force_truths_equal && (i == 1 || i == 2)) w[i] = 0;
        }

    // Shared decision rates: pick1[t] = Pr{pos1 | truth1=t},
    // pick2[t] = Pr{pos2 | pos1, truth2=t}. pos2 requires pos1.
    Rational pick1[2], pick2[2];
    for (int t = 0; t < 2; ++t) pick1[t] = Rational(rng.next_below(R + 1), R);
    for (int t = 0; t < 2; ++t) pick2[t] = Rational(rng.next_below(R + 1), R);

    DistributionBuilder<Rational> builder(groups);
    BigInt total = 0;
    for (const auto& w : truth_weights)
        for (std::uint64_t v : w) total += v;
    if (total == 0) return std::nullopt;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int t1 = 0; t1 < 2; ++t1)
            for (int t2 = 0; t2 < 2; ++t2) {
                Rational base(BigInt(truth_weights[g][t1 * 2 + t2]), total);
                Rational picked = base * pick1[t1];
                builder.set(g, t1, t2, true, true, picked * pick2[t2]);
                builder.set(g, t1, t2, true, false, picked * (Rational(1) - pick2[t2]));
                builder.set(g, t1, t2, false, false, base - picked);
            }
    JointDistribution<Rational> dist = builder.build();

    Counterexample cex{std::move(dist), Rational(0), Rational(0), Rational(0), trial};
    try {
        cex.naive_stage1_slack = epsilon_slack(cex.dist, Stage::One, Stage::One,
                                               first_minority(groups));
        cex.delta = stage2_conditional_slack(cex.dist, first_minority(groups));
        cex.alpha = epsilon_slack(cex.dist, Stage::Two, Stage::Two, first_minority(groups));
    } catch (const Error&) {
        return std::nullopt;  // degenerate slice; not a candidate
    }
    if (cex.naive_stage1_slack != 0 || cex.delta != 0) return std::nullopt;
    if (!(cex.alpha < 0)) return std::nullopt;
    if (cex.alpha > -opts.min_violation) return std::nullopt;
    return cex;
}

}  // namespace detail

/// Scans `trials` seeded random constrained distributions and returns the
/// hit with the lowest trial index, or nothing. Trial seeds depend only on
/// the trial number, so the result is identical for any thread count.
inline std::optional<Counterexample> search_counterexample(
    std::uint64_t seed, std::uint64_t trials, const GroupSet& groups,
    const CounterexampleSearchOptions& opts = {}) {
    if (trials < 1) throw PreconditionError("counterexample search needs at least one trial");

    unsigned workers = opts.threads == 0 ? 1 : opts.threads;
    if (workers > trials) workers = static_cast<unsigned>(trials);

    std::vector<std::optional<Counterexample>> found(workers);
    auto scan = [&](unsigned w) {
        std::uint64_t begin = trials * w / workers;
        std::uint64_t end = trials * (w + 1) / workers;
        for (std::uint64_t t = begin; t < end; ++t) {
            auto hit = detail::counterexample_trial(seed, t, groups, opts);
            if (hit) {
                found[w] = std::move(hit);
                return;
            }
        }
    };
    if (workers == 1) {
        scan(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
        for (auto& th : pool) th.join();
    }

    std::optional<Counterexample> best;
    for (auto& f : found)
        if (f && (!best || f->trial_index < best->trial_index)) best = std::move(f);
    return best;
}

inline std::optional<Counterexample> search_counterexample(
    std::uint64_t seed, std::uint64_t trials, const CounterexampleSearchOptions& opts = {}) {
    return search_counterexample(seed, trials, GroupSet::majority_minority(), opts);
}

}  // namespace fairpipe

#endif  // FAIRPIPE_COMPOSITION_HPP
