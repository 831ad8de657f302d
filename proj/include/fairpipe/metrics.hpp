#ifndef FAIRPIPE_METRICS_HPP
#define FAIRPIPE_METRICS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairpipe/distribution.hpp"
#include "fairpipe/errors.hpp"
#include "fairpipe/rational.hpp"

namespace fairpipe {

/// Which stage's decision / truth bit a rate refers to.
enum class Stage { One, Two };

namespace detail {
inline bool cell_pos(const Cell& c, Stage s) { return s == Stage::One ? c.pos1 : c.pos2; }
inline bool cell_truth(const Cell& c, Stage s) { return s == Stage::One ? c.truth1 : c.truth2; }
}  // namespace detail

/// Pr{event | given} = Pr{event and given} / Pr{given}. Throws when the
/// condition has zero mass; empirical tables with empty conditioning cells
/// surface here instead of silently reading 0/0 as 0.
template <class T, class Event, class Given>
T conditional_rate(const JointDistribution<T>& dist, Event&& event, Given&& given) {
    T denom = dist.mass_where(given);
    if (ScalarTraits<T>::is_zero(denom))
        throw UndefinedConditionalError("conditioning event has zero probability mass");
    T num = dist.mass_where([&](const Cell& c) { return given(c) && event(c); });
    return num / denom;
}

/// Pr{decision positive at `predictor` | truth at `target` = 1, group}.
template <class T>
T true_positive_rate(const JointDistribution<T>& dist, Stage predictor, Stage target,
                     std::size_t group) {
    return conditional_rate(
        dist, [&](const Cell& c) { return detail::cell_pos(c, predictor); },
        [&](const Cell& c) { return c.group == group && detail::cell_truth(c, target); });
}

/// Maximal eps for which the group satisfies (1+eps)-equal opportunity
/// against the majority: TPR_group / TPR_majority - 1. Negative values mean
/// the group is selected below the majority rate.
template <class T>
T epsilon_slack(const JointDistribution<T>& dist, Stage predictor, Stage target,
                std::size_t group) {
    T majority = true_positive_rate(dist, predictor, target, dist.groups().majority_index());
    if (ScalarTraits<T>::is_zero(majority))
        throw InfeasibleSlackError("majority true-positive rate is zero; no slack ratio exists");
    T mine = true_positive_rate(dist, predictor, target, group);
    return mine / majority - T(1);
}

template <class T>
T epsilon_slack(const JointDistribution<T>& dist, Stage predictor, Stage target,
                std::string_view group) {
    return epsilon_slack(dist, predictor, target, dist.groups().index_of(group));
}

template <class T>
struct GroupSlack {
    std::string group;
    T slack;
    std::optional<T> tested_eps;
    std::optional<bool> pass;  // slack >= tested_eps (exact on rationals)
};

/// Per-group slack values and verdicts for one (predictor, target) pair.
template <class T>
struct SlackReport {
    std::vector<GroupSlack<T>> rows;  // one per non-majority group, label order

    bool all_pass() const {
        for (const auto& r : rows)
            if (r.pass && !*r.pass) return false;
        return true;
    }
    const GroupSlack<T>& row(std::string_view group) const {
        for (const auto& r : rows)
            if (r.group == group) return r;
        throw SpecError("no slack row for group '" + std::string(group) + "'");
    }
};

/// Tests (1+eps_t)-equal opportunity for every non-majority group t.
/// Validates the side condition (1+eps_t) * TPR_majority in [0, 1]; a
/// violation names the offending group. Pass epsilons by group label;
/// groups without an entry get `default_eps`.
template <class T>
SlackReport<T> check_eps_eo(const JointDistribution<T>& dist, Stage predictor, Stage target,
                            const std::map<std::string, T>& eps_by_group,
                            std::optional<T> default_eps = std::nullopt) {
    const GroupSet& groups = dist.groups();
    T majority_tpr = true_positive_rate(dist, predictor, target, groups.majority_index());
    if (ScalarTraits<T>::is_zero(majority_tpr))
        throw InfeasibleSlackError("majority true-positive rate is zero; no slack ratio exists");

    SlackReport<T> report;
    for (std::size_t g : groups.minority_indices()) {
        const std::string& label = groups.label(g);
        GroupSlack<T> row;
        row.group = label;
        row.slack = epsilon_slack(dist, predictor, target, g);
        auto it = eps_by_group.find(label);
        if (it != eps_by_group.end())
            row.tested_eps = it->second;
        else if (default_eps)
            row.tested_eps = *default_eps;
        if (row.tested_eps) {
            const T& eps = *row.tested_eps;
            T scaled = (T(1) + eps) * majority_tpr;
            if (scaled < T(0) || scaled > T(1))
                throw InfeasibleEpsilonError(
                    label, "eps " + format_scalar(eps) + " for group '" + label +
                               "' is infeasible: (1+eps)*TPR_majority = " + format_scalar(scaled) +
                               " lies outside [0, 1]");
            row.pass = row.slack >= eps - ScalarTraits<T>::verdict_tolerance();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

/// Single tested eps applied to every non-majority group.
template <class T>
SlackReport<T> check_eps_eo(const JointDistribution<T>& dist, Stage predictor, Stage target,
                            const T& eps) {
    return check_eps_eo(dist, predictor, target, {}, std::optional<T>(eps));
}

/// Slack of the stage-2 decision among stage-1 survivors:
/// Pr{pos2 | pos1, truth2=1, group} / Pr{pos2 | pos1, truth2=1, majority} - 1.
/// Zero-mass conditioning here is the small-pool failure mode: the group
/// had no stage-1 survivors who were stage-2 qualified.
template <class T>
T stage2_conditional_slack(const JointDistribution<T>& dist, std::size_t group) {
    auto rate = [&](std::size_t g) {
        return conditional_rate(
            dist, [](const Cell& c) { return c.pos2; },
            [&](const Cell& c) { return c.group == g && c.pos1 && c.truth2; });
    };
    T majority = rate(dist.groups().majority_index());
    if (ScalarTraits<T>::is_zero(majority))
        throw InfeasibleSlackError("majority stage-2 conditional rate is zero; no slack ratio exists");
    return rate(group) / majority - T(1);
}

template <class T>
T stage2_conditional_slack(const JointDistribution<T>& dist, std::string_view group) {
    return stage2_conditional_slack(dist, dist.groups().index_of(group));
}

/// Slack of the stage-1 decision measured against the FINAL-stage truth:
/// Pr{pos1 | truth2=1, group} / Pr{pos1 | truth2=1, majority} - 1.
/// This is the cross-stage premise of the composition bound, not a
/// self-contained stage-1 fairness statement.
template <class T>
T stage1_cross_slack(const JointDistribution<T>& dist, std::size_t group) {
    return epsilon_slack(dist, Stage::One, Stage::Two, group);
}

template <class T>
T stage1_cross_slack(const JointDistribution<T>& dist, std::string_view group) {
    return stage1_cross_slack(dist, dist.groups().index_of(group));
}

/// Pr{pos1 | truth1=1, group} / Pr{pos1 | truth2=1, group}: how far the
/// stage-1 decision's own-truth rate sits from its final-truth rate. At 1
/// for every group, per-stage fairness statements compose; away from 1
/// they decouple.
template <class T>
T decoupling_ratio(const JointDistribution<T>& dist, std::size_t group) {
    T own = conditional_rate(
        dist, [](const Cell& c) { return c.pos1; },
        [&](const Cell& c) { return c.group == group && c.truth1; });
    T cross = conditional_rate(
        dist, [](const Cell& c) { return c.pos1; },
        [&](const Cell& c) { return c.group == group && c.truth2; });
    if (ScalarTraits<T>::is_zero(cross))
        throw UndefinedRatioError("Pr{pos1 | truth2=1} is zero; decoupling ratio undefined");
    return own / cross;
}

template <class T>
T decoupling_ratio(const JointDistribution<T>& dist, std::string_view group) {
    return decoupling_ratio(dist, dist.groups().index_of(group));
}

}  // namespace fairpipe

#endif  // FAIRPIPE_METRICS_HPP
