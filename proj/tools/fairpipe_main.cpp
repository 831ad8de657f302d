// fairpipe command line: audit | simulate | compose | feedback.
//
// Machine output is line-oriented comma-delimited text opening with a
// schema header "# fairpipe/1 <subcommand>". Exit codes: 0 pass/success,
// 1 usage or input error, 2 failed verdict, infeasibility, or divergence.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fairpipe/fairpipe.hpp>

namespace {

using namespace fairpipe;

int exit_code_for(const Error& e) {
    if (dynamic_cast<const InfeasibleScenarioError*>(&e)) return 2;
    if (dynamic_cast<const InfeasibleEpsilonError*>(&e)) return 2;
    if (dynamic_cast<const DivergenceError*>(&e)) return 2;
    return 1;
}

/// Stdout by default, a file when --output names one.
struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit OutputTarget(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path, std::ios::binary);
        if (!file) throw Error("cannot open output file '" + path + "'");
        stream = &file;
    }
    std::ostream& out() { return *stream; }
};

std::string opt_rational(const std::optional<Rational>& v) {
    return v ? format_rational(*v) : std::string();
}

// -- audit ----------------------------------------------------------------------

GroupSet groups_from_table(const OutcomeTable& table, const std::optional<std::string>& majority) {
    std::vector<std::string> order;
    for (const OutcomeRow& row : table.rows()) {
        bool seen = false;
        for (const std::string& g : order) seen = seen || g == row.record.group;
        if (!seen) order.push_back(row.record.group);
    }
    if (order.empty()) throw EmptyPopulationError("population is empty; no rates are estimable");
    return GroupSet(order, majority.value_or(order.front()));
}

/// Audit accepts either a joint distribution table or a two-stage outcomes
/// file; the header line decides which.
JointDistribution<Rational> load_audit_input(const std::string& path,
                                             const std::optional<std::string>& majority) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    std::istringstream scan(text);
    std::string line, first;
    while (std::getline(scan, line)) {
        std::string t = detail::trim(line);
        if (!t.empty() && t[0] != '#') {
            first = t;
            break;
        }
    }
    if (first.empty()) throw ParseError(1, "empty input file");

    std::istringstream replay(text);
    if (first.rfind("group,", 0) == 0) return load_distribution(replay, majority);
    if (first.rfind("id,group,status", 0) == 0) {
        OutcomeTable table = load_outcomes(replay);
        if (table.num_stages() != 2)
            throw SpecError("audit needs two-stage outcomes, got " +
                            std::to_string(table.num_stages()) + " stages");
        return empirical_distribution<Rational>(table, groups_from_table(table, majority));
    }
    throw ParseError(1, "unrecognized input header '" + first + "'");
}

struct AuditRow {
    std::string metric;
    std::string group;
    std::optional<Rational> value;
    std::optional<Rational> tested;
    std::optional<bool> pass;
};

struct AuditOpts {
    std::string input, output, format = "machine";
    std::optional<std::string> majority;
    std::optional<std::string> eps_text, delta_text;
};

int cmd_audit(const AuditOpts& o) {
    JointDistribution<Rational> dist = load_audit_input(o.input, o.majority);
    const GroupSet& groups = dist.groups();
    std::optional<Rational> eps, delta;
    if (o.eps_text) eps = parse_rational(*o.eps_text);
    if (o.delta_text) delta = parse_rational(*o.delta_text);

    std::vector<AuditRow> rows;

    // Stage-1 equal opportunity; degenerate pools must surface, so no catch.
    {
        SlackReport<Rational> rep =
            eps ? check_eps_eo(dist, Stage::One, Stage::One, *eps)
                : check_eps_eo(dist, Stage::One, Stage::One, std::map<std::string, Rational>{});
        for (const GroupSlack<Rational>& r : rep.rows)
            rows.push_back({"naive_stage1", r.group, r.slack, r.tested_eps, r.pass});
    }

    for (std::size_t g : groups.minority_indices()) {
        const std::string& label = groups.label(g);
        try {
            rows.push_back(
                {"stage1_cross", label, stage1_cross_slack(dist, g), std::nullopt, std::nullopt});
        } catch (const Error&) {
            rows.push_back({"stage1_cross", label, std::nullopt, std::nullopt, std::nullopt});
        }
    }

    // Stage-2 conditional slack among stage-1 survivors, tested against
    // --delta with the same side condition the stage checks use.
    {
        Rational maj_rate = conditional_rate(
            dist, [](const Cell& c) { return c.pos2; },
            [&](const Cell& c) { return c.group == groups.majority_index() && c.pos1 && c.truth2; });
        if (delta) {
            Rational scaled = (Rational(1) + *delta) * maj_rate;
            if (scaled < 0 || scaled > 1)
                throw InfeasibleEpsilonError(
                    groups.majority_label(),
                    "delta " + format_rational(*delta) +
                        " is infeasible: (1+delta) times the majority conditional rate is " +
                        format_rational(scaled) + ", outside [0, 1]");
        }
        for (std::size_t g : groups.minority_indices()) {
            Rational slack = stage2_conditional_slack(dist, g);
            std::optional<bool> pass;
            if (delta) pass = slack >= *delta;
            rows.push_back({"stage2_conditional", groups.label(g), slack, delta, pass});
        }
    }

    for (std::size_t g : groups.minority_indices()) {
        const std::string& label = groups.label(g);
        try {
            rows.push_back({"pipeline", label, epsilon_slack(dist, Stage::Two, Stage::Two, g),
                            std::nullopt, std::nullopt});
        } catch (const Error&) {
            rows.push_back({"pipeline", label, std::nullopt, std::nullopt, std::nullopt});
        }
        try {
            rows.push_back(
                {"decoupling_ratio", label, decoupling_ratio(dist, g), std::nullopt, std::nullopt});
        } catch (const Error&) {
            rows.push_back({"decoupling_ratio", label, std::nullopt, std::nullopt, std::nullopt});
        }
    }

    bool all_pass = true;
    for (const AuditRow& r : rows)
        if (r.pass && !*r.pass) all_pass = false;

    OutputTarget target(o.output);
    std::ostream& out = target.out();
    if (o.format == "machine") {
        out << "# fairpipe/1 audit\n";
        out << "metric,group,value,tested,verdict\n";
        for (const AuditRow& r : rows) {
            out << r.metric << "," << r.group << "," << opt_rational(r.value) << ","
                << opt_rational(r.tested) << ",";
            if (r.pass) out << (*r.pass ? "PASS" : "FAIL");
            out << "\n";
        }
    } else {
        out << "audit of " << o.input << " (majority: " << groups.majority_label() << ")\n";
        for (const AuditRow& r : rows) {
            out << "  " << r.metric << "[" << r.group << "] = "
                << (r.value ? format_rational(*r.value) : "undefined");
            if (r.tested)
                out << "  vs " << format_rational(*r.tested) << ": "
                    << (r.pass && *r.pass ? "PASS" : "FAIL");
            out << "\n";
        }
        out << (all_pass ? "verdict: PASS" : "verdict: FAIL") << "\n";
    }
    return all_pass ? 0 : 2;
}

// -- simulate ---------------------------------------------------------------------

struct SimulateOpts {
    std::string input, output, format = "machine";
    std::optional<std::string> eps_text, delta_text, model_text;
    std::optional<std::uint64_t> trials, seed;
    unsigned threads = 1;
};

int cmd_simulate(const SimulateOpts& o) {
    ScenarioRun run = load_scenario_file(o.input);
    if (o.eps_text) run.scenario.eps = parse_rational(*o.eps_text);
    if (o.delta_text) run.scenario.delta = parse_rational(*o.delta_text);
    if (o.model_text)
        run.scenario.model =
            *o.model_text == "quota" ? SamplingModel::FixedQuota : SamplingModel::Bernoulli;
    if (o.trials) run.trials = *o.trials;
    if (o.seed) run.seed = *o.seed;
    run.scenario.validate();

    const HiringScenario& s = run.scenario;
    FeasibilityReport fr = feasibility_check(s);
    const char* model_name = s.model == SamplingModel::Bernoulli ? "bernoulli" : "quota";

    OutputTarget target(o.output);
    std::ostream& out = target.out();
    bool machine = o.format == "machine";

    if (machine) {
        out << "# fairpipe/1 simulate\n";
        out << "scenario,n_majority," << s.n_majority << "\n";
        out << "scenario,n_minority," << s.n_minority << "\n";
        out << "scenario,n_interview," << s.n_interview << "\n";
        out << "scenario,n_hire," << s.n_hire << "\n";
        out << "scenario,eps," << format_rational(s.eps) << "\n";
        out << "scenario,delta," << format_rational(s.delta) << "\n";
        out << "scenario,qualification_rate," << format_rational(s.qualification_rate) << "\n";
        out << "scenario,model," << model_name << "\n";
        out << "feasibility,max_minority_hires," << format_rational(fr.max_minority_hires) << "\n";
        out << "feasibility,requested_minority_hires,"
            << format_rational(fr.requested_minority_hires) << "\n";
        out << "feasibility,feasible," << (fr.feasible ? 1 : 0) << "\n";
        if (!fr.feasible) out << "feasibility,binding_constraint," << fr.binding_constraint << "\n";
    } else {
        out << "scenario: " << s.n_majority << " majority / " << s.n_minority
            << " minority applicants, " << s.n_interview << " interviews, " << s.n_hire
            << " hires, eps=" << format_rational(s.eps) << ", delta=" << format_rational(s.delta)
            << ", model=" << model_name << "\n";
        out << "feasibility: max minority hires " << format_rational(fr.max_minority_hires)
            << ", requested " << format_rational(fr.requested_minority_hires) << " -> "
            << (fr.feasible ? "feasible" : "INFEASIBLE (" + fr.binding_constraint + ")") << "\n";
    }
    if (!fr.feasible) {
        std::cerr << "error: infeasible scenario: " << fr.binding_constraint << "\n";
        return 2;
    }

    GroupRates rates = solve_rates(s);
    ExpectedOutcome expected = expected_counts(s);
    if (machine) {
        out << "rate,interview,majority," << format_rational(rates.interview_majority) << "\n";
        out << "rate,interview,minority," << format_rational(rates.interview_minority) << "\n";
        out << "rate,hire,majority," << format_rational(rates.hire_majority) << "\n";
        out << "rate,hire,minority," << format_rational(rates.hire_minority) << "\n";
        out << "expected,interviewed,majority," << format_rational(expected.interviewed_majority)
            << "\n";
        out << "expected,interviewed,minority," << format_rational(expected.interviewed_minority)
            << "\n";
        out << "expected,hired,majority," << format_rational(expected.hired_majority) << "\n";
        out << "expected,hired,minority," << format_rational(expected.hired_minority) << "\n";
        out << "figure,majority,applicants," << s.n_majority << "\n";
        out << "figure,majority,interviewed," << format_rational(expected.interviewed_majority)
            << "\n";
        out << "figure,majority,hired," << format_rational(expected.hired_majority) << "\n";
        out << "figure,minority,applicants," << s.n_minority << "\n";
        out << "figure,minority,interviewed," << format_rational(expected.interviewed_minority)
            << "\n";
        out << "figure,minority,hired," << format_rational(expected.hired_minority) << "\n";
    } else {
        out << "rates: interview " << format_rational(rates.interview_majority) << " / "
            << format_rational(rates.interview_minority) << ", hire "
            << format_rational(rates.hire_majority) << " / "
            << format_rational(rates.hire_minority) << " (majority / minority)\n";
        out << "expected: interviewed " << format_rational(expected.interviewed_majority) << " / "
            << format_rational(expected.interviewed_minority) << ", hired "
            << format_rational(expected.hired_majority) << " / "
            << format_rational(expected.hired_minority) << "\n";
    }

    if (run.trials > 0) {
        MonteCarloResult mc = monte_carlo(s, run.trials, run.seed, o.threads);
        auto emit = [&](const char* measure, const char* group, const MomentStats& st) {
            if (machine) {
                out << "mc," << measure << "," << group << ",mean," << format_double(st.mean)
                    << "\n";
                out << "mc," << measure << "," << group << ",variance,"
                    << format_double(st.variance) << "\n";
                out << "mc," << measure << "," << group << ",se_mean," << format_double(st.se_mean)
                    << "\n";
                out << "mc," << measure << "," << group << ",se_variance,"
                    << format_double(st.se_variance) << "\n";
            } else {
                out << "mc " << measure << " " << group << ": mean " << format_double(st.mean)
                    << " (se " << format_double(st.se_mean) << "), variance "
                    << format_double(st.variance) << " (se " << format_double(st.se_variance)
                    << ")\n";
            }
        };
        if (machine) {
            out << "mc,trials," << run.trials << "\n";
            out << "mc,seed," << run.seed << "\n";
        } else {
            out << "monte carlo: " << run.trials << " trials, seed " << run.seed << "\n";
        }
        emit("interviewed", "majority", mc.interviewed_majority);
        emit("interviewed", "minority", mc.interviewed_minority);
        emit("hired", "majority", mc.hired_majority);
        emit("hired", "minority", mc.hired_minority);
    }
    return 0;
}

// -- compose ----------------------------------------------------------------------

struct ComposeOpts {
    std::string input, output, format = "machine";
    std::optional<std::string> majority;
    std::optional<std::uint64_t> search;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool xy_equal = false;
    std::string min_violation = "1/10";
};

int cmd_compose_verify(const ComposeOpts& o) {
    JointDistribution<Rational> dist = load_distribution_file(o.input, o.majority);
    std::vector<CompositionReport<Rational>> reports = verify_composition_all(dist);

    bool any_fail = false;
    OutputTarget target(o.output);
    std::ostream& out = target.out();
    bool machine = o.format == "machine";
    if (machine) {
        out << "# fairpipe/1 compose\n";
        out << "group,eps,delta,alpha,bound,assumption1,assumption2,assumption3,verdict\n";
    }
    bool leaky = false;
    for (const CompositionReport<Rational>& r : reports) {
        if (r.verdict && !*r.verdict) any_fail = true;
        leaky = leaky || !r.assumptions_hold[2];
        if (machine) {
            out << r.group << "," << opt_rational(r.eps) << "," << opt_rational(r.delta) << ","
                << opt_rational(r.alpha) << "," << opt_rational(r.bound) << ","
                << r.assumptions_hold[0] << "," << r.assumptions_hold[1] << ","
                << r.assumptions_hold[2] << ",";
            if (r.verdict) out << (*r.verdict ? "PASS" : "FAIL");
            out << "\n";
        } else {
            out << r.group << ": eps=" << (r.eps ? format_rational(*r.eps) : "undefined")
                << " delta=" << (r.delta ? format_rational(*r.delta) : "undefined")
                << " alpha=" << (r.alpha ? format_rational(*r.alpha) : "undefined")
                << " bound=" << (r.bound ? format_rational(*r.bound) : "undefined");
            if (r.verdict)
                out << " -> " << (*r.verdict ? "PASS" : "FAIL");
            else
                out << " -> assumptions not met ("
                    << (r.assumptions_hold[2] ? "slack undefined" : "stage-2 positives leak past stage 1")
                    << ")";
            out << "\n";
        }
    }
    if (leaky && machine) {
        // surface the cells letting stage-2 positives bypass stage 1
        dist.for_each_cell([&](const Cell& c, const Rational& m) {
            if (c.pos2 && !c.pos1 && m != 0)
                out << "leak," << dist.groups().label(c.group) << "," << c.truth1 << ","
                    << c.truth2 << "," << c.pos1 << "," << c.pos2 << "," << format_rational(m)
                    << "\n";
        });
    }
    return any_fail ? 2 : 0;
}

int cmd_compose_search(const ComposeOpts& o) {
    CounterexampleSearchOptions opts;
    opts.min_violation = parse_rational(o.min_violation);
    opts.force_truths_equal = o.xy_equal;
    opts.threads = o.threads;
    std::optional<Counterexample> cx = search_counterexample(o.seed, *o.search, opts);
    if (!cx) {
        std::cerr << "no counterexample with violation >= " << o.min_violation << " in "
                  << *o.search << " trials (seed " << o.seed << ")\n";
        return 2;
    }
    if (o.format == "plain") {
        OutputTarget target(o.output);
        target.out() << "counterexample at trial " << cx->trial_index << " (seed " << o.seed
                     << " of " << *o.search << " trials)\n"
                     << "  naive stage-1 slack " << format_rational(cx->naive_stage1_slack)
                     << ", stage-2 conditional slack " << format_rational(cx->delta) << "\n"
                     << "  pipeline slack " << format_rational(cx->alpha) << " ("
                     << format_double(to_double(cx->alpha))
                     << "); rerun with --format machine for the loadable certificate\n";
        return 0;
    }
    DistributionComments comments;
    comments.lines.push_back("fairpipe/1 compose");
    comments.lines.push_back("counterexample certificate");
    comments.lines.push_back("seed = " + std::to_string(o.seed));
    comments.lines.push_back("trials_requested = " + std::to_string(*o.search));
    comments.lines.push_back("trial = " + std::to_string(cx->trial_index));
    comments.lines.push_back("naive_stage1_slack = " + format_rational(cx->naive_stage1_slack));
    comments.lines.push_back("stage2_conditional_slack = " + format_rational(cx->delta));
    comments.lines.push_back("pipeline_slack = " + format_rational(cx->alpha));
    comments.lines.push_back("pipeline_slack_decimal = " + format_double(to_double(cx->alpha)));
    OutputTarget target(o.output);
    write_distribution(target.out(), cx->dist, comments);
    return 0;
}

// -- feedback ---------------------------------------------------------------------

struct FeedbackOpts {
    std::string output, format = "machine";
    std::string rule;
    double lambda = 1.0;
    double r0 = 0.1;
    std::size_t steps = 100;
    double tol = 1e-9;
    bool scan = false;
    double beta_min = 0.0;
    double beta_max = 2.0;
    std::size_t grid = 9;
};

int cmd_feedback(const FeedbackOpts& o) {
    OutputTarget target(o.output);
    std::ostream& out = target.out();
    bool machine = o.format == "machine";

    if (o.scan) {
        ScanResult scan = exponent_stability_scan(o.lambda, o.beta_min, o.beta_max, o.grid);
        if (machine) {
            out << "# fairpipe/1 feedback\n";
            out << "beta,lambda,derivative,class\n";
            for (const ScanRow& r : scan.rows)
                out << format_double(r.beta) << "," << format_double(r.lambda) << ","
                    << format_double(r.derivative) << "," << to_string(r.stability) << "\n";
            if (scan.boundary_beta) out << "boundary," << format_double(*scan.boundary_beta) << "\n";
        } else {
            out << "stability scan, lambda=" << format_double(o.lambda) << "\n";
            for (const ScanRow& r : scan.rows)
                out << "  beta=" << format_double(r.beta) << " slope="
                    << format_double(r.derivative) << " " << to_string(r.stability) << "\n";
            if (scan.boundary_beta)
                out << "boundary near beta=" << format_double(*scan.boundary_beta) << "\n";
        }
        return 0;
    }

    FeedbackSystem sys{parse_rule(o.rule), o.lambda};
    Trajectory tr = iterate(sys, o.r0, o.steps, o.tol);
    if (machine) {
        out << "# fairpipe/1 feedback\n";
        out << "t,r\n";
        for (std::size_t t = 0; t < tr.shares.size(); ++t)
            out << t << "," << format_double(tr.shares[t]) << "\n";
        out << "result,converged," << (tr.converged ? 1 : 0) << "\n";
        if (tr.limit) out << "result,limit," << format_double(*tr.limit) << "\n";
        out << "result,cycled," << (tr.cycled ? 1 : 0) << "\n";
        if (tr.cycled) {
            out << "result,cycle_low," << format_double(tr.cycle.first) << "\n";
            out << "result,cycle_high," << format_double(tr.cycle.second) << "\n";
        }
        out << "result,steps," << tr.shares.size() - 1 << "\n";
    } else {
        for (std::size_t t = 0; t < tr.shares.size(); ++t)
            out << "t=" << t << " r=" << format_double(tr.shares[t]) << "\n";
        if (tr.converged)
            out << "converged to " << format_double(*tr.limit) << " after "
                << tr.shares.size() - 1 << " steps\n";
        else if (tr.cycled)
            out << "period-2 cycle between " << format_double(tr.cycle.first) << " and "
                << format_double(tr.cycle.second) << "\n";
        else
            out << "no convergence within " << o.steps << " steps\n";
    }
    if (tr.converged) {
        try {
            FixedPointReport fp = classify_fixed_point(sys, *tr.limit);
            if (machine)
                out << "classify," << format_double(fp.r_star) << ","
                    << format_double(fp.derivative) << "," << to_string(fp.stability) << "\n";
            else
                out << "fixed point " << format_double(fp.r_star) << ": slope "
                    << format_double(fp.derivative) << ", " << to_string(fp.stability) << "\n";
        } catch (const PreconditionError&) {
            // limit not settled enough to classify; trajectory rows stand alone
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-stage decision pipelines: fairness audits, composition checks, "
                 "hiring simulation, participation feedback"};
    app.require_subcommand(1);

    AuditOpts audit_opts;
    CLI::App* audit = app.add_subcommand(
        "audit", "Equal-opportunity slacks of a two-stage outcomes file or distribution table");
    audit->add_option("--input", audit_opts.input, "outcomes or distribution file")->required();
    audit->add_option("--output", audit_opts.output, "output path (default stdout)");
    audit->add_option("--majority", audit_opts.majority, "majority group label");
    audit->add_option("--eps", audit_opts.eps_text, "tested stage-1 slack (rational)");
    audit->add_option("--delta", audit_opts.delta_text, "tested stage-2 conditional slack");
    audit->add_option("--format", audit_opts.format)->check(CLI::IsMember({"machine", "plain"}));

    SimulateOpts sim_opts;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Two-stage hiring scenario: exact tables and Monte Carlo");
    simulate->add_option("--input", sim_opts.input, "scenario config file")->required();
    simulate->add_option("--output", sim_opts.output, "output path (default stdout)");
    simulate->add_option("--eps", sim_opts.eps_text, "override stage-1 slack");
    simulate->add_option("--delta", sim_opts.delta_text, "override stage-2 slack");
    simulate->add_option("--model", sim_opts.model_text, "override sampling model")
        ->check(CLI::IsMember({"bernoulli", "quota"}));
    simulate->add_option("--trials", sim_opts.trials, "override Monte Carlo trials");
    simulate->add_option("--seed", sim_opts.seed, "override seed");
    simulate->add_option("--threads", sim_opts.threads, "worker threads (never changes output)");
    simulate->add_option("--format", sim_opts.format)->check(CLI::IsMember({"machine", "plain"}));

    ComposeOpts comp_opts;
    CLI::App* compose =
        app.add_subcommand("compose", "Verify the slack composition bound or search for violations");
    CLI::Option* comp_input =
        compose->add_option("--input", comp_opts.input, "distribution file to verify");
    CLI::Option* comp_search =
        compose->add_option("--search", comp_opts.search, "search N random constructions");
    comp_input->excludes(comp_search);
    comp_search->excludes(comp_input);
    compose->add_option("--output", comp_opts.output, "output path (default stdout)");
    compose->add_option("--majority", comp_opts.majority, "majority group label");
    compose->add_option("--seed", comp_opts.seed, "search seed");
    compose->add_option("--threads", comp_opts.threads, "search threads (never changes output)");
    compose->add_flag("--xy-equal", comp_opts.xy_equal,
                      "restrict the search to populations where the two truth bits agree");
    compose->add_option("--min-violation", comp_opts.min_violation,
                        "minimum |alpha| a counterexample must reach (rational)");
    compose->add_option("--format", comp_opts.format)->check(CLI::IsMember({"machine", "plain"}));

    FeedbackOpts fb_opts;
    CLI::App* feedback =
        app.add_subcommand("feedback", "Participation-share dynamics under an incentive rule");
    CLI::Option* fb_rule =
        feedback->add_option("--rule", fb_opts.rule, "sqrt | inverse | linear | pow:<beta>");
    feedback->add_option("--lambda", fb_opts.lambda, "adjustment rate in (0, 1]");
    feedback->add_option("--r0", fb_opts.r0, "initial participation share");
    feedback->add_option("--steps", fb_opts.steps, "maximum steps");
    feedback->add_option("--tol", fb_opts.tol, "convergence / cycle tolerance");
    CLI::Option* fb_scan =
        feedback->add_flag("--scan", fb_opts.scan, "scan power-rule exponents instead");
    feedback->add_option("--beta-min", fb_opts.beta_min, "scan range start");
    feedback->add_option("--beta-max", fb_opts.beta_max, "scan range end");
    feedback->add_option("--grid", fb_opts.grid, "scan grid points");
    feedback->add_option("--output", fb_opts.output, "output path (default stdout)");
    feedback->add_option("--format", fb_opts.format)->check(CLI::IsMember({"machine", "plain"}));
    fb_rule->excludes(fb_scan);
    fb_scan->excludes(fb_rule);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*audit) return cmd_audit(audit_opts);
        if (*simulate) return cmd_simulate(sim_opts);
        if (*compose) {
            if (comp_opts.search) return cmd_compose_search(comp_opts);
            if (comp_opts.input.empty()) {
                std::cerr << "error: compose needs --input or --search\n";
                return 1;
            }
            return cmd_compose_verify(comp_opts);
        }
        if (*feedback) {
            if (!fb_opts.scan && fb_opts.rule.empty()) {
                std::cerr << "error: feedback needs --rule or --scan\n";
                return 1;
            }
            return cmd_feedback(fb_opts);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
