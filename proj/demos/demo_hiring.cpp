// Walks the 90/10 hiring scenario through four slack settings, printing the
// exact interview/hire tables and a short Monte Carlo check for each.

#include <iostream>

#include <fairpipe/fairpipe.hpp>

using namespace fairpipe;

int main() {
    struct CaseDef {
        const char* label;
        Rational eps, delta;
    };
    const CaseDef cases[] = {
        {"eps=2, delta=0", Rational(2), Rational(0)},
        {"eps=0, delta=2", Rational(0), Rational(2)},
        {"eps=2, delta=-2/3", Rational(2), Rational(-2, 3)},
        {"eps=-2/3, delta=2", Rational(-2, 3), Rational(2)},
    };

    for (const CaseDef& c : cases) {
        HiringScenario s;  // 90/10 applicants, 20 interviews, 2 hires
        s.eps = c.eps;
        s.delta = c.delta;
        std::cout << "case " << c.label << "\n";

        GroupRates rates = solve_rates(s);
        ExpectedOutcome e = expected_counts(s);
        std::cout << "  interview rates " << format_rational(rates.interview_majority) << " / "
                  << format_rational(rates.interview_minority) << ", hire rates "
                  << format_rational(rates.hire_majority) << " / "
                  << format_rational(rates.hire_minority) << " (majority / minority)\n";
        std::cout << "  expected interviewed " << format_rational(e.interviewed_majority) << " / "
                  << format_rational(e.interviewed_minority) << ", hired "
                  << format_rational(e.hired_majority) << " / "
                  << format_rational(e.hired_minority) << "\n";

        FeasibilityReport fr = feasibility_check(s);
        std::cout << "  minority hires: up to " << format_rational(fr.max_minority_hires)
                  << " possible, " << format_rational(fr.requested_minority_hires)
                  << " requested\n";

        MonteCarloResult mc = monte_carlo(s, 20000, 7);
        std::cout << "  mc (20000 trials): minority hired mean " << mc.hired_minority.mean
                  << ", variance " << mc.hired_minority.variance << "\n\n";
    }

    // The two boost-one-stage cases hire identically in expectation; only
    // the slack placement differs. Their joint distributions certify the
    // composed slack alpha = (1+eps)(1+delta) - 1 stage by stage.
    std::cout << "composition on the eps=2 case:\n";
    HiringScenario s;
    s.eps = Rational(2);
    GroupRates r = solve_rates(s);
    DistributionBuilder<Rational> b(GroupSet::majority_minority());
    Rational q[2] = {Rational(s.n_majority, 100), Rational(s.n_minority, 100)};
    Rational p[2] = {r.interview_majority, r.interview_minority};
    Rational h[2] = {r.hire_majority, r.hire_minority};
    for (std::size_t g = 0; g < 2; ++g) {
        b.set(g, true, true, true, true, q[g] * p[g] * h[g]);
        b.set(g, true, true, true, false, q[g] * p[g] * (1 - h[g]));
        b.set(g, true, true, false, false, q[g] * (1 - p[g]));
    }
    CompositionReport<Rational> rep = verify_composition(b.build(), "minority");
    std::cout << "  eps=" << format_rational(*rep.eps) << " delta=" << format_rational(*rep.delta)
              << " alpha=" << format_rational(*rep.alpha) << " bound="
              << format_rational(*rep.bound) << " -> " << (*rep.verdict ? "PASS" : "FAIL")
              << "\n";
    return 0;
}
