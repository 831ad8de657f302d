#ifndef FAIRPIPE_FEEDBACK_HPP
#define FAIRPIPE_FEEDBACK_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairpipe/errors.hpp"

namespace fairpipe {

/// Weighting function over a group's participation share. The payout a
/// group attracts is g(share), so g's curvature decides whether small
/// groups are over- or under-rewarded per capita.
struct IncentiveRule {
    std::string name;
    std::function<double(double)> g;
};

inline IncentiveRule sqrt_rule() {
    return {"sqrt", [](double r) { return std::sqrt(r); }};
}
inline IncentiveRule inverse_rule() {
    return {"inverse", [](double r) { return 1.0 / r; }};
}
inline IncentiveRule linear_rule() {
    return {"linear", [](double r) { return r; }};
}
inline IncentiveRule power_rule(double beta) {
    if (!std::isfinite(beta)) throw InvalidRuleError("power rule exponent must be finite");
    return {"pow:" + std::to_string(beta), [beta](double r) { return std::pow(r, beta); }};
}

/// Accepts "sqrt", "inverse", "linear", or "pow:<beta>".
inline IncentiveRule parse_rule(const std::string& text) {
    if (text == "sqrt") return sqrt_rule();
    if (text == "inverse") return inverse_rule();
    if (text == "linear") return linear_rule();
    if (text.rfind("pow:", 0) == 0) {
        std::size_t used = 0;
        double beta = 0;
        try {
            beta = std::stod(text.substr(4), &used);
        } catch (const std::exception&) {
            throw InvalidRuleError("unreadable exponent in rule '" + text + "'");
        }
        if (used != text.size() - 4)
            throw InvalidRuleError("unreadable exponent in rule '" + text + "'");
        return power_rule(beta);
    }
    throw InvalidRuleError("unknown incentive rule '" + text + "'");
}

/// Fraction of the total payout won by a group holding participation
/// share r against a complementary group holding 1-r.
inline double payout_share(const IncentiveRule& rule, double r) {
    if (!(r > 0.0 && r < 1.0)) throw PreconditionError("participation share must lie in (0, 1)");
    double a = rule.g(r);
    double b = rule.g(1.0 - r);
    // a weight may underflow to zero on very steep rules; the share then
    // saturates at 0 or 1 and the iteration reports divergence, not a bad rule
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0 || a + b <= 0.0)
        throw InvalidRuleError("rule '" + rule.name +
                               "' is not nonnegative and finite with positive total at share " +
                               std::to_string(r));
    return a / (a + b);
}

/// Payout per member relative to an equal split: share of payout divided
/// by share of population.
inline double per_capita_payout(const IncentiveRule& rule, double r) {
    return payout_share(rule, r) / r;
}

/// Participation share dynamics: each period a fraction lambda of the
/// group re-decides based on current payout share.
struct FeedbackSystem {
    IncentiveRule rule;
    double lambda = 1.0;

    void validate() const {
        if (!(lambda > 0.0 && lambda <= 1.0))
            throw SpecError("adjustment rate lambda must lie in (0, 1]");
    }
};

inline double step(const FeedbackSystem& sys, double r) {
    sys.validate();
    return (1.0 - sys.lambda) * r + sys.lambda * payout_share(sys.rule, r);
}

struct Trajectory {
    std::vector<double> shares;  // shares[t] after t steps; shares[0] = r0
    bool converged = false;
    std::optional<double> limit;
    bool cycled = false;
    std::pair<double, double> cycle = {0, 0};  // low, high share of a period-2 orbit
};

/// Iterates the share map from r0. Stops on convergence (successive
/// shares within tol), on a period-2 cycle (share returns to the value
/// two steps back within tol while successive shares still differ), or
/// after max_steps. Leaves the open interval (0, 1) only by throwing.
inline Trajectory iterate(const FeedbackSystem& sys, double r0, std::size_t max_steps,
                          double tol = 1e-9) {
    sys.validate();
    if (!(r0 > 0.0 && r0 < 1.0))
        throw PreconditionError("initial share must lie in (0, 1)");
    if (max_steps < 1) throw PreconditionError("need at least one step");
    if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");

    Trajectory out;
    out.shares.reserve(max_steps + 1);
    out.shares.push_back(r0);
    for (std::size_t t = 0; t < max_steps; ++t) {
        double r = out.shares.back();
        double next = step(sys, r);
        if (!std::isfinite(next) || next <= 0.0 || next >= 1.0)
            throw DivergenceError(r, t + 1);
        out.shares.push_back(next);
        if (std::fabs(next - r) < tol) {
            out.converged = true;
            out.limit = next;
            break;
        }
        std::size_t n = out.shares.size();
        if (n >= 3 && std::fabs(out.shares[n - 1] - out.shares[n - 3]) < tol) {
            out.cycled = true;
            out.cycle = std::minmax(out.shares[n - 2], out.shares[n - 1]);
            break;
        }
    }
    return out;
}

enum class Stability { Attractive, Repulsive, Neutral };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::Attractive: return "ATTRACTIVE";
        case Stability::Repulsive: return "REPULSIVE";
        default: return "NEUTRAL";
    }
}

/// Central-difference slope of the update map at r.
inline double map_derivative(const FeedbackSystem& sys, double r, double h = 1e-5) {
    if (!(h > 0.0) || r - h <= 0.0 || r + h >= 1.0)
        throw PreconditionError("derivative stencil must stay inside (0, 1)");
    return (step(sys, r + h) - step(sys, r - h)) / (2.0 * h);
}

struct FixedPointReport {
    double r_star = 0;
    double derivative = 0;
    Stability stability = Stability::Neutral;
};

/// Classifies a fixed point by the magnitude of the map's slope there.
/// Slopes within `margin` of 1 stay NEUTRAL rather than guessing.
inline FixedPointReport classify_fixed_point(const FeedbackSystem& sys, double r_star,
                                             double h = 1e-5, double fp_tol = 1e-8,
                                             double margin = 1e-3) {
    double drift = std::fabs(step(sys, r_star) - r_star);
    if (drift > fp_tol)
        throw PreconditionError("share " + std::to_string(r_star) +
                                " is not a fixed point (moves by " + std::to_string(drift) + ")");
    FixedPointReport report;
    report.r_star = r_star;
    report.derivative = map_derivative(sys, r_star, h);
    double mag = std::fabs(report.derivative);
    if (mag < 1.0 - margin)
        report.stability = Stability::Attractive;
    else if (mag > 1.0 + margin)
        report.stability = Stability::Repulsive;
    else
        report.stability = Stability::Neutral;
    return report;
}

struct ScanRow {
    double beta = 0;
    double lambda = 0;
    double derivative = 0;
    Stability stability = Stability::Neutral;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::optional<double> boundary_beta;  // interpolated |slope| = 1 crossing
};

/// Sweeps the power-rule exponent and classifies the symmetric fixed
/// point r = 1/2 at each grid point. For g(r) = r^beta the slope there is
/// (1 - lambda) + lambda * beta, so the stability boundary sits where
/// that magnitude reaches 1.
inline ScanResult exponent_stability_scan(double lambda, double beta_min, double beta_max,
                                          std::size_t grid) {
    if (grid < 1) throw PreconditionError("scan grid needs at least one point");
    if (grid == 1 && beta_max != beta_min)
        throw PreconditionError("single-point scan needs beta_max == beta_min");
    if (beta_max < beta_min) throw PreconditionError("scan range is reversed");

    ScanResult out;
    out.rows.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        double beta = grid == 1 ? beta_min
                                : beta_min + (beta_max - beta_min) * static_cast<double>(i) /
                                                 static_cast<double>(grid - 1);
        FeedbackSystem sys{power_rule(beta), lambda};
        FixedPointReport fp = classify_fixed_point(sys, 0.5);
        out.rows.push_back(ScanRow{beta, lambda, fp.derivative, fp.stability});
    }
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        double lo = std::fabs(out.rows[i - 1].derivative) - 1.0;
        double hi = std::fabs(out.rows[i].derivative) - 1.0;
        if ((lo < 0) == (hi < 0) || lo == hi) continue;
        double frac = -lo / (hi - lo);
        out.boundary_beta =
            out.rows[i - 1].beta + frac * (out.rows[i].beta - out.rows[i - 1].beta);
        break;
    }
    return out;
}

}  // namespace fairpipe

#endif  // FAIRPIPE_FEEDBACK_HPP
