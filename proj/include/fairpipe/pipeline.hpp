#ifndef FAIRPIPE_PIPELINE_HPP
#define FAIRPIPE_PIPELINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairpipe/errors.hpp"
#include "fairpipe/groups.hpp"
#include "fairpipe/rng.hpp"

namespace fairpipe {

/// Stage decisions are small integers; binary stages use {0,1}. Early
/// termination is a distinct status, never the value 0, so non-binary
/// final stages stay expressible.
using Decision = int;

/// One individual flowing through a pipeline. `truths` holds the per-stage
/// ground-truth qualification bits, index 0 = stage 1.
struct Record {
    std::string id;
    std::string group;
    std::vector<std::uint8_t> truths;

    bool truth(std::size_t stage) const {  // stage is 1-based
        if (stage == 0 || stage > truths.size())
            throw SpecError("record '" + id + "' has no truth bit for stage " +
                            std::to_string(stage));
        return truths[stage - 1] != 0;
    }
};

/// Decision functions see the record and a window of earlier decisions.
/// They must be pure given any seed baked in at construction; evaluation
/// order is then irrelevant and population runs can be parallelized.
using DecideFn = std::function<Decision(const Record&, std::span<const Decision>)>;
using RuleFn = std::function<bool(Decision)>;

struct StageSpec {
    DecideFn decide;
    std::vector<Decision> domain{0, 1};
    std::optional<RuleFn> rule;  // absent only on the final stage
    std::size_t lookback = 1;    // stage t sees decisions lookback..t-1
};

enum class Status { Passed, Fail };

struct Outcome {
    Status status = Status::Fail;
    std::optional<Decision> final_decision;  // present iff Passed
    std::vector<Decision> stage_decisions;   // length T if Passed, failed_at if Fail
    std::optional<std::size_t> failed_at;    // 1-based, present iff Fail

    bool passed() const { return status == Status::Passed; }
};

/// Ordered decision stages. Interior stages carry a pass/continue rule;
/// the final stage's decision is the run's result. Cumulative and informed
/// variants need no extra structure: lookback windows expose prior
/// decisions, and decision functions may close over population summary
/// statistics computed before the run.
class PipelineSpec {
public:
    explicit PipelineSpec(std::vector<StageSpec> stages) : stages_(std::move(stages)) {
        if (stages_.empty()) throw SpecError("pipeline needs at least one stage");
        for (std::size_t i = 0; i < stages_.size(); ++i) {
            const StageSpec& s = stages_[i];
            std::size_t t = i + 1;
            if (!s.decide) throw SpecError("stage " + std::to_string(t) + " has no decision function");
            if (s.domain.empty())
                throw SpecError("stage " + std::to_string(t) + " has an empty decision domain");
            bool is_last = t == stages_.size();
            if (is_last && s.rule)
                throw SpecError("final stage must not carry a rule function");
            if (!is_last && !s.rule)
                throw SpecError("stage " + std::to_string(t) + " is missing its rule function");
            if (s.lookback < 1 || s.lookback > t)
                throw SpecError("stage " + std::to_string(t) + " lookback " +
                                std::to_string(s.lookback) + " outside [1, " + std::to_string(t) + "]");
        }
    }

    std::size_t num_stages() const { return stages_.size(); }
    const StageSpec& stage(std::size_t t) const { return stages_.at(t - 1); }  // 1-based

    /// First `t` stages as a standalone pipeline; the new final stage
    /// drops its rule. Running it reproduces the decision prefix of a
    /// full run on the same record.
    PipelineSpec truncated(std::size_t t) const {
        if (t == 0 || t > stages_.size())
            throw SpecError("cannot truncate to " + std::to_string(t) + " stages");
        std::vector<StageSpec> prefix(stages_.begin(), stages_.begin() + static_cast<long>(t));
        prefix.back().rule.reset();
        return PipelineSpec(std::move(prefix));
    }

    /// True when every stage is binary and rules pass exactly the 1s.
    bool is_filtering() const {
        for (std::size_t i = 0; i < stages_.size(); ++i) {
            const StageSpec& s = stages_[i];
            if (s.domain != std::vector<Decision>{0, 1}) return false;
            if (s.rule && (!(*s.rule)(1) || (*s.rule)(0))) return false;
        }
        return true;
    }

private:
    std::vector<StageSpec> stages_;
};

namespace detail {
inline bool in_domain(const std::vector<Decision>& domain, Decision v) {
    for (Decision d : domain)
        if (d == v) return true;
    return false;
}
}  // namespace detail

/// Runs a record through the pipeline: stage t sees the decisions of
/// stages lookback..t-1, the first rule returning 0 stops the run with
/// Fail, otherwise the final stage's decision is the result.
inline Outcome run_pipeline(const PipelineSpec& spec, const Record& record) {
    std::size_t T = spec.num_stages();
    if (record.truths.size() < T)
        throw SpecError("record '" + record.id + "' has " + std::to_string(record.truths.size()) +
                        " truth bits but the pipeline has " + std::to_string(T) + " stages");
    Outcome out;
    out.stage_decisions.reserve(T);
    for (std::size_t t = 1; t <= T; ++t) {
        const StageSpec& s = spec.stage(t);
        std::span<const Decision> visible(out.stage_decisions.data() + (s.lookback - 1),
                                          t - s.lookback);
        Decision d = s.decide(record, visible);
        if (!detail::in_domain(s.domain, d))
            throw DomainViolationError("stage " + std::to_string(t) + " produced decision " +
                                       std::to_string(d) + " outside its domain");
        out.stage_decisions.push_back(d);
        if (s.rule && !(*s.rule)(d)) {
            out.status = Status::Fail;
            out.failed_at = t;
            return out;
        }
    }
    out.status = Status::Passed;
    out.final_decision = out.stage_decisions.back();
    return out;
}

/// Binary filtering pipeline: only positive decisions proceed.
inline PipelineSpec make_filtering(std::vector<DecideFn> deciders) {
    if (deciders.empty()) throw SpecError("filtering pipeline needs at least one decider");
    std::vector<StageSpec> stages;
    stages.reserve(deciders.size());
    for (std::size_t i = 0; i < deciders.size(); ++i) {
        StageSpec s;
        s.decide = std::move(deciders[i]);
        s.domain = {0, 1};
        s.lookback = 1;
        if (i + 1 < deciders.size()) s.rule = [](Decision d) { return d == 1; };
        stages.push_back(std::move(s));
    }
    return PipelineSpec(std::move(stages));
}

// -- Decider helpers ---------------------------------------------------------

inline DecideFn constant_decider(Decision v) {
    return [v](const Record&, std::span<const Decision>) { return v; };
}

/// Copies the record's ground-truth bit for the given stage.
inline DecideFn truth_decider(std::size_t stage) {
    return [stage](const Record& r, std::span<const Decision>) {
        return static_cast<Decision>(r.truth(stage));
    };
}

/// Seeded random yes/no at a per-group rate. The draw depends only on
/// (seed, stage_tag, record id), so results are reproducible and
/// independent of evaluation order.
inline DecideFn seeded_bernoulli_decider(std::function<double(const Record&)> rate,
                                         std::uint64_t seed, std::uint64_t stage_tag) {
    return [rate = std::move(rate), seed, stage_tag](const Record& r, std::span<const Decision>) {
        SplitMix64 rng(derive_seed(seed, stage_tag, fnv1a64(r.id)));
        return static_cast<Decision>(rng.next_bernoulli(rate(r)));
    };
}

// -- Population evaluation ----------------------------------------------------

struct OutcomeRow {
    Record record;
    Outcome outcome;
};

/// Per-record outcomes plus the aggregates the audit layer needs. Rows keep
/// their input order.
class OutcomeTable {
public:
    OutcomeTable(std::size_t num_stages, std::vector<OutcomeRow> rows)
        : num_stages_(num_stages), rows_(std::move(rows)) {}

    std::size_t size() const { return rows_.size(); }
    std::size_t num_stages() const { return num_stages_; }
    const std::vector<OutcomeRow>& rows() const { return rows_; }

    /// Records of `group` whose run reached stage t (made a decision there).
    std::size_t reached_count(std::string_view group, std::size_t stage) const {
        std::size_t n = 0;
        for (const OutcomeRow& row : rows_)
            if (row.record.group == group && row.outcome.stage_decisions.size() >= stage) ++n;
        return n;
    }

    /// Records of `group` whose stage-t decision was positive (== 1).
    std::size_t positive_count(std::string_view group, std::size_t stage) const {
        std::size_t n = 0;
        for (const OutcomeRow& row : rows_)
            if (row.record.group == group && row.outcome.stage_decisions.size() >= stage &&
                row.outcome.stage_decisions[stage - 1] == 1)
                ++n;
        return n;
    }

    std::size_t group_count(std::string_view group) const {
        std::size_t n = 0;
        for (const OutcomeRow& row : rows_)
            if (row.record.group == group) ++n;
        return n;
    }

private:
    std::size_t num_stages_;
    std::vector<OutcomeRow> rows_;
};

/// Runs every record through the pipeline. The table takes ownership of
/// the records so truths stay available to the metrics layer.
inline OutcomeTable evaluate_population(const PipelineSpec& spec, std::vector<Record> records) {
    if (records.empty()) throw EmptyPopulationError("population is empty; no rates are estimable");
    std::vector<OutcomeRow> rows;
    rows.reserve(records.size());
    for (Record& r : records) {
        Outcome out = run_pipeline(spec, r);
        rows.push_back(OutcomeRow{std::move(r), std::move(out)});
    }
    return OutcomeTable(spec.num_stages(), std::move(rows));
}

}  // namespace fairpipe

#endif  // FAIRPIPE_PIPELINE_HPP
