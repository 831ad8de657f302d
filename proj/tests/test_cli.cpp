#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include "testutil.hpp"

using namespace fairpipe;
using testutil::data_path;
using testutil::golden_path;
using testutil::read_file;
using testutil::run_cli;
using testutil::temp_path;
using testutil::write_file;

namespace {

std::string make_case1_outcomes_file() {
    std::string path = temp_path("outcomes.csv");
    std::ofstream out(path, std::ios::binary);
    write_outcomes(out, testutil::case1_outcomes());
    return path;
}

std::string make_case_distribution_file(const Rational& eps, const Rational& delta) {
    std::string path = temp_path("dist.csv");
    std::ofstream out(path, std::ios::binary);
    write_distribution(out, testutil::case_distribution(eps, delta));
    return path;
}

}  // namespace

TEST_CASE("audit passes the worked case at its design slacks", "[cli]") {
    std::string outcomes = make_case1_outcomes_file();
    auto r = run_cli("audit --input " + outcomes + " --eps 2 --delta 0");
    INFO(r.out << r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("# fairpipe/1 audit\n") == 0);
    REQUIRE(r.out.find("naive_stage1,minority,2,2,PASS\n") != std::string::npos);
    REQUIRE(r.out.find("stage2_conditional,minority,0,0,PASS\n") != std::string::npos);
    REQUIRE(r.out.find("pipeline,minority,2,,\n") != std::string::npos);
    REQUIRE(r.out.find("decoupling_ratio,minority,1,,\n") != std::string::npos);

    // a distribution-table input produces the same verdicts
    std::string dist = make_case_distribution_file(Rational(2), Rational(0));
    auto d = run_cli("audit --input " + dist + " --eps 2 --delta 0");
    REQUIRE(d.code == 0);
    REQUIRE(d.out.find("naive_stage1,minority,2,2,PASS\n") != std::string::npos);
}

TEST_CASE("audit fails when the tested slack is not met", "[cli]") {
    std::string outcomes = make_case1_outcomes_file();
    auto r = run_cli("audit --input " + outcomes + " --eps 5/2");
    REQUIRE(r.code == 2);
    REQUIRE(r.out.find("naive_stage1,minority,2,5/2,FAIL\n") != std::string::npos);
}

TEST_CASE("audit maps input problems to exit 1", "[cli]") {
    std::string empty = temp_path("empty.csv");
    write_file(empty, "");
    REQUIRE(run_cli("audit --input " + empty).code == 1);

    REQUIRE(run_cli("audit --input /nonexistent/file.csv").code == 1);

    // zero qualified minority members: the tested conditional is undefined
    std::string degenerate = temp_path("degenerate.csv");
    write_file(degenerate,
               "id,group,status,failed_at,truth_1,truth_2,decision_1,decision_2\n"
               "a,majority,PASSED,,1,1,1,1\n"
               "b,majority,FAIL,1,1,1,0,\n"
               "c,minority,FAIL,1,0,0,0,\n");
    auto r = run_cli("audit --input " + degenerate + " --eps 0");
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("zero probability mass") != std::string::npos);
}

TEST_CASE("audit rejects an infeasible tested epsilon", "[cli]") {
    std::string outcomes = make_case1_outcomes_file();
    // (1+6) * TPR_majority = 7/6 leaves [0, 1]
    auto r = run_cli("audit --input " + outcomes + " --eps 6");
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("infeasible") != std::string::npos);
}

TEST_CASE("simulate reproduces the four golden tables", "[cli]") {
    for (int c = 1; c <= 4; ++c) {
        std::string name = "case" + std::to_string(c);
        std::string out = temp_path("sim_" + name + ".csv");
        auto r = run_cli("simulate --input " + data_path("scenario_" + name + ".cfg") +
                         " --output " + out);
        INFO(name << ": " << r.err);
        REQUIRE(r.code == 0);
        REQUIRE(read_file(out) == read_file(golden_path("simulate_" + name + ".csv")));
    }
}

TEST_CASE("simulate output is byte-deterministic across reruns and threads", "[cli]") {
    std::string a = temp_path("sim_a.csv"), b = temp_path("sim_b.csv"), c = temp_path("sim_c.csv");
    std::string base = "simulate --input " + data_path("scenario_case1.cfg") +
                       " --trials 500 --seed 9 --output ";
    REQUIRE(run_cli(base + a).code == 0);
    REQUIRE(run_cli(base + b).code == 0);
    REQUIRE(run_cli(base + c + " --threads 3").code == 0);
    std::string first = read_file(a);
    REQUIRE_FALSE(first.empty());
    REQUIRE(first == read_file(b));
    REQUIRE(first == read_file(c));
    REQUIRE(first.find("mc,hired,minority,mean,") != std::string::npos);
}

TEST_CASE("simulate surfaces infeasibility with exit 2", "[cli]") {
    auto r = run_cli("simulate --input " + data_path("scenario_infeasible.cfg"));
    REQUIRE(r.code == 2);
    REQUIRE(r.out.find("feasibility,feasible,0\n") != std::string::npos);
    REQUIRE(r.out.find("feasibility,binding_constraint,") != std::string::npos);
    REQUIRE(r.err.find("infeasible") != std::string::npos);

    // flag overrides rescue the same config
    auto ok = run_cli("simulate --input " + data_path("scenario_infeasible.cfg") +
                      " --delta 0 --trials 0");
    REQUIRE(ok.code == 0);
}

TEST_CASE("compose verifies the worked distribution", "[cli]") {
    std::string dist = make_case_distribution_file(Rational(2), Rational(0));
    auto r = run_cli("compose --input " + dist);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("# fairpipe/1 compose\n") == 0);
    REQUIRE(r.out.find("minority,2,0,2,2,1,1,1,PASS\n") != std::string::npos);

    std::string cancel = make_case_distribution_file(Rational(2), Rational(-2, 3));
    auto z = run_cli("compose --input " + cancel);
    REQUIRE(z.code == 0);
    REQUIRE(z.out.find("minority,2,-2/3,0,0,1,1,1,PASS\n") != std::string::npos);
}

TEST_CASE("compose surfaces assumption-3 leaks with their cells", "[cli]") {
    std::string path = temp_path("leak.csv");
    write_file(path,
               "group,x,y,xhat,yhat,mass\n"
               "majority,1,1,1,1,3/10\n"
               "majority,1,1,0,1,1/10\n"
               "majority,1,1,0,0,1/10\n"
               "minority,1,1,1,1,2/10\n"
               "minority,1,1,0,0,3/10\n");
    auto r = run_cli("compose --input " + path);
    REQUIRE(r.code == 0);  // nothing testable failed; the assumptions just do not hold
    REQUIRE(r.out.find("minority,-1/3,0,-1/2,-1/3,1,1,0,\n") != std::string::npos);
    REQUIRE(r.out.find("leak,majority,1,1,0,1,1/10\n") != std::string::npos);
}

TEST_CASE("compose search emits a loadable, re-verifiable certificate", "[cli]") {
    std::string cert = temp_path("certificate.csv");
    auto r = run_cli("compose --search 100000 --seed 2026 --output " + cert);
    INFO(r.err);
    REQUIRE(r.code == 0);
    std::string text = read_file(cert);
    REQUIRE(text.find("# counterexample certificate\n") != std::string::npos);
    REQUIRE(text.find("# naive_stage1_slack = 0\n") != std::string::npos);
    REQUIRE(text.find("# stage2_conditional_slack = 0\n") != std::string::npos);

    JointDistribution<Rational> dist = load_distribution_file(cert);
    REQUIRE(epsilon_slack(dist, Stage::One, Stage::One, "minority") == Rational(0));
    REQUIRE(stage2_conditional_slack(dist, "minority") == Rational(0));
    REQUIRE(epsilon_slack(dist, Stage::Two, Stage::Two, "minority") <= Rational(-1, 10));

    // byte determinism of the search itself
    std::string again = temp_path("certificate2.csv");
    REQUIRE(run_cli("compose --search 100000 --seed 2026 --threads 2 --output " + again).code ==
            0);
    REQUIRE(read_file(again) == text);
}

TEST_CASE("compose search under agreeing truth bits finds nothing", "[cli]") {
    auto r = run_cli("compose --search 2000 --seed 3 --xy-equal");
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("no counterexample") != std::string::npos);
}

TEST_CASE("feedback trajectories and summaries", "[cli]") {
    auto sqrt_run = run_cli("feedback --rule sqrt --r0 0.1 --steps 50");
    REQUIRE(sqrt_run.code == 0);
    REQUIRE(sqrt_run.out.find("# fairpipe/1 feedback\nt,r\n0,0.1\n") == 0);
    REQUIRE(sqrt_run.out.find("result,converged,1\n") != std::string::npos);
    auto limit_at = sqrt_run.out.find("result,limit,");
    REQUIRE(limit_at != std::string::npos);
    double limit = std::stod(sqrt_run.out.substr(limit_at + 13));
    REQUIRE(std::fabs(limit - 0.5) < 1e-6);
    REQUIRE(sqrt_run.out.find("\nclassify,") != std::string::npos);
    REQUIRE(sqrt_run.out.find("ATTRACTIVE") != std::string::npos);

    auto inverse_run = run_cli("feedback --rule inverse --r0 0.1 --steps 50 --tol 1e-12");
    REQUIRE(inverse_run.code == 0);
    REQUIRE(inverse_run.out.find("result,cycled,1\n") != std::string::npos);
    REQUIRE(inverse_run.out.find("result,cycle_low,0.1\n") != std::string::npos);
    REQUIRE(inverse_run.out.find("result,cycle_high,0.9\n") != std::string::npos);

    auto linear_run = run_cli("feedback --rule linear --r0 0.3");
    REQUIRE(linear_run.code == 0);
    REQUIRE(linear_run.out.find("result,limit,0.3\n") != std::string::npos);
}

TEST_CASE("feedback scan rows and boundary", "[cli]") {
    auto r = run_cli("feedback --scan --beta-min 0 --beta-max 2 --grid 9");
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("beta,lambda,derivative,class\n") != std::string::npos);
    REQUIRE(r.out.find("0,1,0,ATTRACTIVE\n") != std::string::npos);
    auto row2 = r.out.find("\n2,1,");
    REQUIRE(row2 != std::string::npos);
    REQUIRE(std::fabs(std::stod(r.out.substr(row2 + 5)) - 2.0) < 1e-4);
    REQUIRE(r.out.find(",REPULSIVE\n", row2) != std::string::npos);
    REQUIRE(r.out.find("boundary,1\n") != std::string::npos);
}

TEST_CASE("feedback divergence exits 2 with the last state", "[cli]") {
    auto r = run_cli("feedback --rule pow:400 --r0 0.99 --steps 10");
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("step 1") != std::string::npos);
}

TEST_CASE("usage errors exit 1, help exits 0", "[cli]") {
    REQUIRE(run_cli("").code == 1);
    REQUIRE(run_cli("frobnicate").code == 1);
    REQUIRE(run_cli("audit").code == 1);                       // missing --input
    REQUIRE(run_cli("feedback --rule cube").code == 1);        // unknown rule
    REQUIRE(run_cli("feedback").code == 1);                    // neither rule nor scan
    REQUIRE(run_cli("simulate --input x --bogus").code == 1);  // unknown flag
    REQUIRE(run_cli("compose").code == 1);                     // no input, no search
    REQUIRE(run_cli("--help").code == 0);
    REQUIRE(run_cli("audit --help").code == 0);
}
