// Acceptance gate: one line per criterion, nonzero exit if any fail.
// Usage: fairpipe_acceptance [path-to-cli]

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <fairpipe/fairpipe.hpp>

#include "testutil.hpp"

using namespace fairpipe;

namespace {

std::string g_cli_path = FAIRPIPE_CLI_PATH;

testutil::CliResult run_cli_at(const std::string& args) {
    std::string out_path = testutil::temp_path("acc_stdout");
    std::string err_path = testutil::temp_path("acc_stderr");
    std::string cmd = g_cli_path + " " + args + " >" + out_path + " 2>" + err_path;
    int raw = std::system(cmd.c_str());
    testutil::CliResult r;
    r.code = raw == -1 ? -1 : WEXITSTATUS(raw);
    r.out = testutil::read_file(out_path);
    r.err = testutil::read_file(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, ap);
    va_end(ap);
    return buf;
}

// -- 1: worked-case tables ------------------------------------------------

bool criterion_tables(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    struct Case {
        Rational eps, delta;
        Rational im, in, hm, hn;       // exact expectations
        double pim, pin, phm, phn;     // printed (possibly truncated) values
    };
    const Case cases[4] = {
        {Rational(2), Rational(0), Rational(15), Rational(5), Rational(3, 2), Rational(1, 2),
         15, 5, 1.5, 0.5},
        {Rational(0), Rational(2), Rational(18), Rational(2), Rational(3, 2), Rational(1, 2),
         18, 2, 1.5, 0.5},
        {Rational(2), Rational(-2, 3), Rational(15), Rational(5), Rational(9, 5), Rational(1, 5),
         15, 5, 1.8, 0.2},
        {Rational(-2, 3), Rational(2), Rational(135, 7), Rational(5, 7), Rational(9, 5),
         Rational(1, 5), 19.2857, 0.7142, 1.8, 0.2},
    };
    for (const Case& c : cases) {
        HiringScenario s;
        s.eps = c.eps;
        s.delta = c.delta;
        ExpectedOutcome e = expected_counts(s);
        if (e.interviewed_majority != c.im || e.interviewed_minority != c.in ||
            e.hired_majority != c.hm || e.hired_minority != c.hn) {
            detail = "exact expectation mismatch at eps=" + format_rational(c.eps);
            return false;
        }
        if (std::fabs(to_double(e.interviewed_majority) - c.pim) > 0.01 ||
            std::fabs(to_double(e.interviewed_minority) - c.pin) > 0.01 ||
            std::fabs(to_double(e.hired_majority) - c.phm) > 0.01 ||
            std::fabs(to_double(e.hired_minority) - c.phn) > 0.01) {
            detail = "printed-value mismatch at eps=" + format_rational(c.eps);
            return false;
        }
    }
    double secs = seconds_since(t0);
    detail = fmt("all four cases exact and within 0.01 of printed values (%.3f s, limit 1 s)",
                 secs);
    return secs < 1.0;
}

// -- 2: composition bound property suite ------------------------------------

bool criterion_bound_suite(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(424242);
    GroupSet groups = GroupSet::majority_minority();
    DistributionGenOptions opts;  // filtering on
    std::size_t qualifying = 0, violations = 0, generated = 0;
    while (qualifying < 10000 && generated < 100000) {
        ++generated;
        JointDistribution<Rational> dist = random_rational_distribution(rng, groups, opts);
        CompositionReport<Rational> rep = verify_composition(dist, std::size_t{1});
        if (!rep.all_assumptions_hold() || !rep.eps || !rep.delta || !rep.alpha || !rep.verdict)
            continue;
        if (*rep.eps < Rational(0) || *rep.delta < Rational(0)) continue;
        ++qualifying;
        // the bound must hold, and under these assumptions it is an identity
        if (!*rep.verdict || *rep.alpha != *rep.bound) ++violations;
    }
    double secs = seconds_since(t0);
    detail = fmt("%zu qualifying distributions (of %zu generated), %zu violations "
                 "(%.1f s, limit 60 s)",
                 qualifying, generated, violations, secs);
    return qualifying >= 10000 && violations == 0 && secs < 60.0;
}

// -- 3: counterexample search + independent re-verification -----------------

bool criterion_counterexample(std::string& detail) {
    CounterexampleSearchOptions opts;
    opts.min_violation = Rational(1, 10);
    opts.threads = 2;
    std::optional<Counterexample> cx = search_counterexample(2026, 100000, opts);
    if (!cx) {
        detail = "no counterexample within 100000 trials at seed 2026";
        return false;
    }
    if (cx->naive_stage1_slack != Rational(0) || cx->delta != Rational(0) ||
        cx->alpha > Rational(-1, 10)) {
        detail = "search returned a certificate violating its own constraints";
        return false;
    }

    // independent re-verification: conditional probabilities straight from masses
    auto cond = [&](std::size_t g, auto event, auto given) -> std::optional<Rational> {
        Rational num(0), den(0);
        cx->dist.for_each_cell([&](const Cell& c, const Rational& m) {
            if (c.group != g || !given(c)) return;
            den += m;
            if (event(c)) num += m;
        });
        if (den == Rational(0)) return std::nullopt;
        return num / den;
    };
    auto pos1 = [](const Cell& c) { return c.pos1; };
    auto pos2 = [](const Cell& c) { return c.pos2; };
    auto truth1 = [](const Cell& c) { return c.truth1; };
    auto truth2 = [](const Cell& c) { return c.truth2; };
    auto surv2 = [](const Cell& c) { return c.pos1 && c.truth2; };

    auto t1m = cond(0, pos1, truth1), t1n = cond(1, pos1, truth1);
    auto c2m = cond(0, pos2, surv2), c2n = cond(1, pos2, surv2);
    auto t2m = cond(0, pos2, truth2), t2n = cond(1, pos2, truth2);
    if (!t1m || !t1n || !c2m || !c2n || !t2m || !t2n) {
        detail = "a re-verification conditional had zero mass";
        return false;
    }
    Rational naive = *t1n / *t1m - 1;
    Rational delta = *c2n / *c2m - 1;
    Rational alpha = *t2n / *t2m - 1;
    if (naive != Rational(0) || delta != Rational(0) || alpha != cx->alpha ||
        alpha > Rational(-1, 10)) {
        detail = "independent recomputation disagrees with the certificate";
        return false;
    }

    // file round trip preserves the verdict
    std::string path = testutil::temp_path("acc_certificate.csv");
    {
        std::ofstream out(path, std::ios::binary);
        write_distribution(out, cx->dist);
    }
    JointDistribution<Rational> back = load_distribution_file(path);
    std::remove(path.c_str());
    if (epsilon_slack(back, Stage::Two, Stage::Two, std::size_t{1}) != cx->alpha) {
        detail = "certificate does not survive a file round trip";
        return false;
    }

    detail = fmt("trial %llu: naive slack 0, delta 0, alpha %s <= -1/10, re-verified",
                 static_cast<unsigned long long>(cx->trial_index),
                 format_rational(cx->alpha).c_str());
    return true;
}

// -- 4: feedback worked numbers ---------------------------------------------

bool criterion_feedback_numbers(std::string& detail) {
    if (payout_share(sqrt_rule(), 0.1) != 0.25) {
        detail = "payout_share(sqrt, 0.1) != 0.25";
        return false;
    }
    if (payout_share(inverse_rule(), 0.1) != 0.9) {
        detail = "payout_share(inverse, 0.1) != 0.9";
        return false;
    }
    FeedbackSystem sq{sqrt_rule(), 1.0};
    Trajectory ts = iterate(sq, 0.1, 50, 1e-9);
    if (!ts.converged || !ts.limit || std::fabs(*ts.limit - 0.5) >= 1e-6) {
        detail = "sqrt trajectory missed 0.5 within 1e-6 in 50 steps";
        return false;
    }
    FeedbackSystem inv{inverse_rule(), 1.0};
    Trajectory ti = iterate(inv, 0.1, 50, 1e-12);
    double lo = std::min(ti.cycle.first, ti.cycle.second);
    double hi = std::max(ti.cycle.first, ti.cycle.second);
    if (!ti.cycled || std::fabs(lo - 0.1) >= 1e-12 || std::fabs(hi - 0.9) >= 1e-12) {
        detail = "inverse trajectory did not report the {0.1, 0.9} cycle within 1e-12";
        return false;
    }
    detail = fmt("shares exact; sqrt reaches 0.5 in %zu steps; inverse cycles {0.1, 0.9}",
                 ts.shares.size() - 1);
    return true;
}

// -- 5: stability boundary ----------------------------------------------------

bool criterion_stability(std::string& detail) {
    const double attract[] = {0.0, 0.25, 0.5, 0.9};
    const double repel[] = {1.5, 2.0};
    for (double b : attract) {
        ScanResult s = exponent_stability_scan(1.0, b, b, 1);
        const ScanRow& row = s.rows.at(0);
        if (row.stability != Stability::Attractive || std::fabs(row.derivative - b) > 1e-4) {
            detail = fmt("beta %.2f not ATTRACTIVE with derivative within 1e-4", b);
            return false;
        }
    }
    for (double b : repel) {
        ScanResult s = exponent_stability_scan(1.0, b, b, 1);
        const ScanRow& row = s.rows.at(0);
        if (row.stability != Stability::Repulsive || std::fabs(row.derivative - b) > 1e-4) {
            detail = fmt("beta %.2f not REPULSIVE with derivative within 1e-4", b);
            return false;
        }
    }
    detail = "f'(0.5) within 1e-4 of beta; {0, 0.25, 0.5, 0.9} attract, {1.5, 2} repel";
    return true;
}

// -- 6: the variance comparison ------------------------------------------------

bool criterion_variance(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    HiringScenario c1, c2;
    c1.eps = Rational(2);
    c1.delta = Rational(0);
    c2.eps = Rational(0);
    c2.delta = Rational(2);

    MonteCarloResult b1 = monte_carlo(c1, 100000, 61, 4);
    MonteCarloResult b2 = monte_carlo(c2, 100000, 62, 4);
    const MomentStats &h1 = b1.hired_minority, &h2 = b2.hired_minority;
    double gap = std::fabs(h1.variance - h2.variance);
    double band = 3.0 * std::hypot(h1.se_variance, h2.se_variance);
    bool bernoulli_ok = gap <= band;

    c1.model = SamplingModel::FixedQuota;
    c2.model = SamplingModel::FixedQuota;
    MonteCarloResult q1 = monte_carlo(c1, 100000, 63, 4);
    MonteCarloResult q2 = monte_carlo(c2, 100000, 64, 4);

    double secs = seconds_since(t0);
    detail = fmt("bernoulli minority-hire variance %.4f vs %.4f (|gap| %.4f <= 3se %.4f: %s); "
                 "quota %.4f vs %.4f (%.1f s, limit 30 s)",
                 h1.variance, h2.variance, gap, band, bernoulli_ok ? "yes" : "NO",
                 q1.hired_minority.variance, q2.hired_minority.variance, secs);
    return bernoulli_ok && secs < 30.0;
}

// -- 7: Monte Carlo / analytic agreement ---------------------------------------

bool criterion_mc_agreement(std::string& detail) {
    const Rational eps[4] = {Rational(2), Rational(0), Rational(2), Rational(-2, 3)};
    const Rational del[4] = {Rational(0), Rational(2), Rational(-2, 3), Rational(2)};
    double worst = 0.0;
    for (int c = 0; c < 4; ++c) {
        for (SamplingModel model : {SamplingModel::Bernoulli, SamplingModel::FixedQuota}) {
            HiringScenario s;
            s.eps = eps[c];
            s.delta = del[c];
            s.model = model;
            ExpectedOutcome e = expected_counts(s);
            MonteCarloResult mc = monte_carlo(s, 10000, 40 + c, 4);
            const std::pair<const MomentStats*, Rational> checks[4] = {
                {&mc.interviewed_majority, e.interviewed_majority},
                {&mc.interviewed_minority, e.interviewed_minority},
                {&mc.hired_majority, e.hired_majority},
                {&mc.hired_minority, e.hired_minority},
            };
            for (const auto& [stats, expect] : checks) {
                double err = std::fabs(stats->mean - to_double(expect));
                if (err > 3.0 * stats->se_mean) {
                    detail = fmt("case %d (%s): |mean - expected| = %.5f > 3 se = %.5f", c + 1,
                                 model == SamplingModel::Bernoulli ? "bernoulli" : "quota", err,
                                 3.0 * stats->se_mean);
                    return false;
                }
                if (stats->se_mean > 0) worst = std::max(worst, err / stats->se_mean);
            }
        }
    }
    detail = fmt("all 32 measures within 3 standard errors at 10000 trials (worst %.2f se)",
                 worst);
    return true;
}

// -- 8: metric invariants + CLI byte determinism --------------------------------

bool criterion_invariants(std::string& detail) {
    SplitMix64 rng(777);
    GroupSet groups = GroupSet::majority_minority();
    DistributionGenOptions opts;

    std::size_t consistency = 0, stricter = 0;
    for (int i = 0; i < 200; ++i) {
        JointDistribution<Rational> dist = random_rational_distribution(rng, groups, opts);
        Rational slack;
        try {
            slack = epsilon_slack(dist, Stage::Two, Stage::Two, std::size_t{1});
        } catch (const Error&) {
            continue;
        }
        // the measured slack is always a feasible, passing target
        SlackReport<Rational> at = check_eps_eo(dist, Stage::Two, Stage::Two, slack);
        if (!at.row("minority").pass || !*at.row("minority").pass) {
            detail = "check_eps_eo fails at the measured slack";
            return false;
        }
        ++consistency;
        // any strictly larger target must fail (when it stays feasible)
        try {
            SlackReport<Rational> above =
                check_eps_eo(dist, Stage::Two, Stage::Two, slack + Rational(1, 1000));
            if (*above.row("minority").pass) {
                detail = "check_eps_eo passes above the measured slack";
                return false;
            }
            ++stricter;
        } catch (const InfeasibleEpsilonError&) {
        }
        // renormalization invariance
        if (epsilon_slack(dist.scaled(Rational(3, 7)), Stage::Two, Stage::Two, std::size_t{1}) !=
            slack) {
            detail = "slack changed under rescaling";
            return false;
        }
    }
    if (consistency < 150 || stricter < 100) {
        detail = fmt("too few informative draws (%zu consistency, %zu stricter)", consistency,
                     stricter);
        return false;
    }

    DistributionGenOptions equal_opts;
    equal_opts.force_truths_equal = true;
    std::size_t decoupled = 0;
    for (int i = 0; i < 100; ++i) {
        JointDistribution<Rational> dist = random_rational_distribution(rng, groups, equal_opts);
        try {
            if (decoupling_ratio(dist, std::size_t{1}) != Rational(1)) {
                detail = "decoupling ratio left 1 on a truths-agree distribution";
                return false;
            }
            ++decoupled;
        } catch (const Error&) {
        }
    }
    if (decoupled < 80) {
        detail = "too few decoupling draws";
        return false;
    }

    // filtering monotonicity on random seeded pipelines
    for (int rep = 0; rep < 20; ++rep) {
        std::uint64_t seed = rng.next();
        std::vector<DecideFn> deciders;
        for (std::uint64_t t = 0; t < 3; ++t) {
            double lo = 0.1 + 0.8 * SplitMix64(derive_seed(seed, t)).next_double();
            deciders.push_back(seeded_bernoulli_decider(
                [lo](const Record& r) { return r.group == "majority" ? lo : 1.0 - lo; }, seed, t));
        }
        PipelineSpec spec = make_filtering(std::move(deciders));
        std::vector<Record> records;
        for (int i = 0; i < 200; ++i)
            records.push_back(Record{"r" + std::to_string(i),
                                     i % 3 == 0 ? "minority" : "majority",
                                     {rng.next_bernoulli(0.5), rng.next_bernoulli(0.5),
                                      rng.next_bernoulli(0.5)}});
        OutcomeTable table = evaluate_population(spec, std::move(records));
        for (const char* group : {"majority", "minority"}) {
            std::size_t prev = table.group_count(group);
            for (std::size_t stage = 1; stage <= 3; ++stage) {
                std::size_t reached = table.reached_count(group, stage);
                std::size_t positive = table.positive_count(group, stage);
                if (reached > prev || positive > reached) {
                    detail = "filtering monotonicity violated";
                    return false;
                }
                prev = positive;
            }
        }
    }

    // CLI byte determinism
    if (g_cli_path.empty()) {
        detail = "no CLI path (pass it as argv[1])";
        return false;
    }
    std::string cfg = testutil::temp_path("acc_scenario.cfg");
    testutil::write_file(cfg,
                         "n_majority = 90\nn_minority = 10\nn_interview = 20\nn_hire = 2\n"
                         "eps = 2\ndelta = 0\nmodel = bernoulli\ntrials = 300\nseed = 12\n");
    testutil::CliResult s1 = run_cli_at("simulate --input " + cfg);
    testutil::CliResult s2 = run_cli_at("simulate --input " + cfg + " --threads 3");
    std::remove(cfg.c_str());
    if (s1.code != 0 || s2.code != 0 || s1.out.empty() || s1.out != s2.out) {
        detail = "simulate output differs between identical runs";
        return false;
    }
    testutil::CliResult f1 = run_cli_at("feedback --scan --beta-min 0 --beta-max 2 --grid 9");
    testutil::CliResult f2 = run_cli_at("feedback --scan --beta-min 0 --beta-max 2 --grid 9");
    if (f1.code != 0 || f1.out.empty() || f1.out != f2.out) {
        detail = "feedback scan output differs between identical runs";
        return false;
    }

    detail = fmt("consistency %zu/200 (stricter %zu), decoupling %zu/100, 20 pipelines "
                 "monotone, CLI byte-identical",
                 consistency, stricter, decoupled);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "worked-case expected counts", criterion_tables},
        {2, "composition bound property suite", criterion_bound_suite},
        {3, "counterexample search and re-verification", criterion_counterexample},
        {4, "feedback worked numbers", criterion_feedback_numbers},
        {5, "stability boundary classification", criterion_stability},
        {6, "minority-hire variance comparison", criterion_variance},
        {7, "Monte Carlo / analytic agreement", criterion_mc_agreement},
        {8, "metric invariants and byte determinism", criterion_invariants},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("%s %d: %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
