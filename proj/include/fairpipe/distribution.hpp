#ifndef FAIRPIPE_DISTRIBUTION_HPP
#define FAIRPIPE_DISTRIBUTION_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fairpipe/errors.hpp"
#include "fairpipe/groups.hpp"
#include "fairpipe/pipeline.hpp"
#include "fairpipe/rational.hpp"

namespace fairpipe {

/// One cell of the joint table over a two-stage run. In the delimited file
/// format the bits appear as columns x, y, xhat, yhat:
///   truth1 (x)  - qualified for stage 1      truth2 (y) - qualified for stage 2
///   pos1 (xhat) - stage-1 decision positive  pos2 (yhat) - stage-2 decision positive
struct Cell {
    std::size_t group;
    bool truth1;
    bool truth2;
    bool pos1;
    bool pos2;
};

/// Exact joint probability table over (group, truth1, truth2, pos1, pos2),
/// 16 cells per group. Immutable after construction; scalar T is double or
/// Rational. Conditional queries are ratio-based, so any positive scaling
/// of the masses describes the same distribution.
template <class T>
class JointDistribution {
public:
    JointDistribution(GroupSet groups, std::vector<T> masses)
        : groups_(std::move(groups)), mass_(std::move(masses)) {
        if (mass_.size() != groups_.size() * 16)
            throw SpecError("mass table needs 16 entries per group");
        T total(0);
        for (const T& m : mass_) {
            if (m < T(0)) throw SpecError("negative probability mass");
            total += m;
        }
        if (ScalarTraits<T>::is_zero(total)) throw SpecError("all probability masses are zero");
        total_ = total;
    }

    /// Normalizes arbitrary nonnegative weights into a probability table.
    static JointDistribution normalized(GroupSet groups, std::vector<T> masses) {
        JointDistribution d(std::move(groups), std::move(masses));
        if (d.total_ != T(1)) {
            for (T& m : d.mass_) m /= d.total_;
            d.total_ = T(1);
        }
        return d;
    }

    static std::size_t index_of(std::size_t group, bool truth1, bool truth2, bool pos1, bool pos2) {
        return (((group * 2 + truth1) * 2 + truth2) * 2 + pos1) * 2 + pos2;
    }

    const GroupSet& groups() const { return groups_; }
    const std::vector<T>& masses() const { return mass_; }
    T total() const { return total_; }

    const T& mass(std::size_t group, bool truth1, bool truth2, bool pos1, bool pos2) const {
        return mass_[index_of(group, truth1, truth2, pos1, pos2)];
    }
    const T& mass(const Cell& c) const { return mass(c.group, c.truth1, c.truth2, c.pos1, c.pos2); }

    /// Total mass of all cells matching the predicate.
    template <class Pred>
    T mass_where(Pred&& pred) const {
        T sum(0);
        for_each_cell([&](const Cell& c, const T& m) {
            if (pred(c)) sum += m;
        });
        return sum;
    }

    template <class Fn>
    void for_each_cell(Fn&& fn) const {
        for (std::size_t g = 0; g < groups_.size(); ++g)
            for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2)
                    for (int p1 = 0; p1 < 2; ++p1)
                        for (int p2 = 0; p2 < 2; ++p2) {
                            Cell c{g, t1 != 0, t2 != 0, p1 != 0, p2 != 0};
                            fn(c, mass(c));
                        }
    }

    /// All masses multiplied by c > 0 (still the same distribution up to
    /// normalization; used by the scale-invariance checks).
    JointDistribution scaled(const T& c) const {
        if (!(c > T(0))) throw SpecError("scale factor must be positive");
        std::vector<T> m = mass_;
        for (T& v : m) v *= c;
        return JointDistribution(groups_, std::move(m));
    }

    JointDistribution renormalized() const { return normalized(groups_, mass_); }

    template <class U>
    JointDistribution<U> cast() const {
        std::vector<U> m;
        m.reserve(mass_.size());
        for (const T& v : mass_) m.push_back(static_cast<U>(to_double(v)));
        return JointDistribution<U>(groups_, std::move(m));
    }

private:
    GroupSet groups_;
    std::vector<T> mass_;
    T total_;
};

/// Mutable builder for assembling a table cell by cell.
template <class T>
class DistributionBuilder {
public:
    explicit DistributionBuilder(GroupSet groups)
        : groups_(std::move(groups)), mass_(groups_.size() * 16, T(0)) {}

    void set(std::size_t group, bool truth1, bool truth2, bool pos1, bool pos2, T m) {
        mass_[JointDistribution<T>::index_of(group, truth1, truth2, pos1, pos2)] = std::move(m);
    }
    void add(std::size_t group, bool truth1, bool truth2, bool pos1, bool pos2, const T& m) {
        mass_[JointDistribution<T>::index_of(group, truth1, truth2, pos1, pos2)] += m;
    }
    const GroupSet& groups() const { return groups_; }

    JointDistribution<T> build() const { return JointDistribution<T>(groups_, mass_); }
    JointDistribution<T> build_normalized() const {
        return JointDistribution<T>::normalized(groups_, mass_);
    }

private:
    GroupSet groups_;
    std::vector<T> mass_;
};

/// Empirical joint distribution of a two-stage run: cell masses are record
/// counts over the population size, exact as rationals. A record that fails
/// at stage 1 counts as negative at both stages.
template <class T = Rational>
JointDistribution<T> empirical_distribution(const OutcomeTable& table, const GroupSet& groups) {
    if (table.num_stages() != 2)
        throw SpecError("joint (truth1, truth2, pos1, pos2) tables need a two-stage pipeline");
    if (table.size() == 0) throw EmptyPopulationError("population is empty; no rates are estimable");
    DistributionBuilder<T> builder(groups);
    for (const OutcomeRow& row : table.rows()) {
        const Record& r = row.record;
        const Outcome& o = row.outcome;
        bool pos1 = !o.stage_decisions.empty() && o.stage_decisions[0] == 1;
        bool pos2 = o.stage_decisions.size() >= 2 && o.stage_decisions[1] == 1 && o.passed();
        builder.add(groups.index_of(r.group), r.truth(1), r.truth(2), pos1, pos2, T(1));
    }
    JointDistribution<T> counts = builder.build();
    return JointDistribution<T>::normalized(counts.groups(), counts.masses());
}

}  // namespace fairpipe

#endif  // FAIRPIPE_DISTRIBUTION_HPP
