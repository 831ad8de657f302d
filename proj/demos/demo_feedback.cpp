// Participation feedback under three incentive rules, then a stability scan
// over power-rule exponents.

#include <iostream>

#include <fairpipe/fairpipe.hpp>

using namespace fairpipe;

int main() {
    for (const char* name : {"sqrt", "linear", "inverse"}) {
        FeedbackSystem sys{parse_rule(name), 1.0};
        Trajectory tr = iterate(sys, 0.1, 60, 1e-12);
        std::cout << name << " from 0.1: ";
        if (tr.converged)
            std::cout << "converged to " << *tr.limit << " in " << tr.shares.size() - 1
                      << " steps";
        else if (tr.cycled)
            std::cout << "period-2 cycle between " << tr.cycle.first << " and "
                      << tr.cycle.second;
        else
            std::cout << "still moving after " << tr.shares.size() - 1 << " steps";
        std::cout << "\n";
    }

    std::cout << "\npower-rule scan at lambda=1 (slope at the 50:50 point):\n";
    ScanResult scan = exponent_stability_scan(1.0, 0.0, 2.0, 9);
    for (const ScanRow& row : scan.rows)
        std::cout << "  beta=" << row.beta << "  slope=" << row.derivative << "  "
                  << to_string(row.stability) << "\n";
    if (scan.boundary_beta)
        std::cout << "stability boundary near beta=" << *scan.boundary_beta << "\n";
    return 0;
}
