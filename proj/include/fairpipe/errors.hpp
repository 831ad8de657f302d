#ifndef FAIRPIPE_ERRORS_HPP
#define FAIRPIPE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairpipe {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline or stage description violates a structural invariant
/// (empty stage list, missing rule, bad lookback window, ...).
class SpecError : public Error {
public:
    using Error::Error;
};

/// A decision function produced a value outside the stage's declared domain.
class DomainViolationError : public Error {
public:
    using Error::Error;
};

/// A population-level operation was asked to run on zero records.
class EmptyPopulationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A conditional probability was requested on a zero-mass condition.
class UndefinedConditionalError : public Error {
public:
    using Error::Error;
};

/// The majority true-positive rate is zero, so no slack ratio exists.
class InfeasibleSlackError : public Error {
public:
    using Error::Error;
};

/// A tested epsilon violates the side condition (1+eps)*TPR_majority in [0,1].
class InfeasibleEpsilonError : public Error {
public:
    InfeasibleEpsilonError(const std::string& group, const std::string& what)
        : Error(what), group_(group) {}
    const std::string& group() const { return group_; }

private:
    std::string group_;
};

/// Denominator of the decoupling ratio is zero.
class UndefinedRatioError : public Error {
public:
    using Error::Error;
};

/// A hiring scenario has no solution with all rates in [0,1].
/// The message names the binding constraint.
class InfeasibleScenarioError : public Error {
public:
    InfeasibleScenarioError(const std::string& constraint, const std::string& what)
        : Error(what), constraint_(constraint) {}
    const std::string& constraint() const { return constraint_; }

private:
    std::string constraint_;
};

/// An incentive rule is nonpositive or non-finite where it was evaluated.
class InvalidRuleError : public Error {
public:
    using Error::Error;
};

/// A feedback trajectory left the open interval (0,1). Carries the last
/// valid participation share and the step at which it was reached.
class DivergenceError : public Error {
public:
    DivergenceError(double last_share, std::size_t step, const std::string& what)
        : Error(what), last_share_(last_share), step_(step) {}
    DivergenceError(double last_share, std::size_t step)
        : DivergenceError(last_share, step,
                          "trajectory left (0, 1) at step " + std::to_string(step) +
                              " (last share " + std::to_string(last_share) + ")") {}
    double last_share() const { return last_share_; }
    std::size_t step() const { return step_; }

private:
    double last_share_;
    std::size_t step_;
};

/// An operation's stated precondition does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace fairpipe

#endif  // FAIRPIPE_ERRORS_HPP
