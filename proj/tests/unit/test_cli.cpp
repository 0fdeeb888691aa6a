#include "doctest.h"

#include "opm/cli.hpp"
#include "opm/errors.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace opm::cli;
using nlohmann::json;

namespace {

struct Out {
    int code = -1;
    std::string out, err;
};

Out call(std::vector<std::string> args)
{
    args.insert(args.begin(), "opmtool");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    Out r;
    r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json call_json(std::vector<std::string> args, int expect_code)
{
    args.push_back("--format");
    args.push_back("json");
    Out r = call(args);
    INFO(r.err);
    CHECK(r.code == expect_code);
    return json::parse(r.out);
}

const json* find_check(const json& report, const std::string& name)
{
    for (const auto& c : report.at("checks"))
        if (c.at("name") == name)
            return &c;
    return nullptr;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}

std::string random_text(std::mt19937_64& rng)
{
    static const std::vector<std::string> pieces = {"a", "Z", " ", "\"", "\\", ",", "\n", "κ", "λ=1.3", "{}", "v_{4,2}"};
    std::uniform_int_distribution<std::size_t> len(0, 6), pick(0, pieces.size() - 1);
    std::string s;
    for (std::size_t i = len(rng); i > 0; --i)
        s += pieces[pick(rng)];
    return s;
}

Report random_report(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> n_checks(0, 5), status(0, 2), coin(0, 1), expo(-300, 300);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    Report r;
    r.command = random_text(rng);
    r.timing_ms = std::abs(mant(rng)) * 1e4;
    for (int i = n_checks(rng); i > 0; --i) {
        Check c{random_text(rng), std::vector<std::string>{"pass", "fail", "skip"}[static_cast<std::size_t>(status(rng))],
                random_text(rng), std::nullopt};
        if (coin(rng))
            c.residual = std::ldexp(mant(rng), expo(rng));
        r.checks.push_back(c);
    }
    r.data = json{{"x", mant(rng)}, {"rows", json::array({json::array({random_text(rng), "1"})})}, {"flag", coin(rng) == 1}};
    return r;
}

} // namespace

TEST_CASE("report JSON round trip on random reports")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        Report r = random_report(rng);
        Report back = json::parse(json(r).dump()).get<Report>();
        CHECK(back == r);
        // re-serialization is byte identical: keys are emitted in sorted order
        CHECK(json(back).dump() == json(r).dump());
    }
}

TEST_CASE("run config round trip and unknown keys")
{
    RunConfig c;
    c.process = "q-ou";
    c.q = "1/2";
    c.alpha = "3";
    c.n = 5;
    c.stu = std::array<double, 3>{0.0, 0.5, 1.0};
    c.tolerance["kernel"] = 1e-9;
    c.mc = true;
    RunConfig back = json(c).get<RunConfig>();
    CHECK(json(back) == json(c));
    CHECK(back.tol("kernel", 1.0) == 1e-9);
    CHECK(back.tol("other", 2.0) == 2.0);
    CHECK_THROWS_AS(json::parse(R"({"proces": "q-ou"})").get<RunConfig>(), opm::ConfigError);
    // numbers in a config may be JSON numbers or exact strings
    RunConfig n = json::parse(R"({"q": 0.3, "mu": "1/2"})").get<RunConfig>();
    CHECK(*n.q == "0.3");
    CHECK(*n.mu == "1/2");
}

TEST_CASE("structural: V_6 entry and independence dichotomy")
{
    json r = call_json({"structural", "--process", "q-wiener", "--q", "1/2", "--n", "6"}, 1);
    CHECK(r.at("data").at("V").size() == 6);
    CHECK(r.at("data").at("V")[3][1] == "5/2*t");
    CHECK(r.at("data").at("V")[0][0] == "1");
    CHECK(find_check(r, "semigroup")->at("status") == "pass");

    json one = call_json({"structural", "--process", "q-wiener", "--q", "1", "--n", "6", "--check", "independence"}, 0);
    CHECK(one.at("checks").size() == 1);
    CHECK(one.at("checks")[0].at("status") == "pass");

    json half = call_json({"structural", "--process", "q-wiener", "--q", "1/2", "--check", "independence"}, 1);
    const json* ind = find_check(half, "independence");
    REQUIRE(ind);
    CHECK(ind->at("status") == "fail");
    CHECK(ind->at("detail").get<std::string>().find("v_{4,2}") != std::string::npos);
}

TEST_CASE("harness: Poisson coefficients at (1, 2, 4)")
{
    json r = call_json({"harness", "--process", "poisson", "--mu", "1", "--stu", "1,2,4"}, 0);
    const json& k = r.at("data").at("coefficients");
    CHECK(k.at("A").get<double>() == doctest::Approx(4.0 / 9));
    CHECK(k.at("B").get<double>() == doctest::Approx(4.0 / 9));
    CHECK(k.at("C").get<double>() == doctest::Approx(1.0 / 9));
    CHECK(k.at("D").get<double>() == doctest::Approx(-4.0 / 9));
    CHECK(k.at("E").get<double>() == 0.0);
    CHECK(k.at("F").get<double>() == doctest::Approx(-4.0 / 9));
    for (const auto& c : r.at("checks"))
        CHECK(c.at("status") == "pass");
}

TEST_CASE("harness: q-OU kappa and lambda")
{
    json r = call_json({"harness", "--process", "q-ou", "--q", "0.3", "--alpha", "1", "--stu", "0,0.5,1"}, 0);
    CHECK(r.at("data").at("harness").at("kappa") == "1");
    CHECK(r.at("data").at("harness").at("lambda") == "13/10");
}

TEST_CASE("harness: sequence file with b_n = n^2 fails at (e4, 2)")
{
    json seq;
    for (int n = 0; n < 25; ++n) {
        seq["a"].push_back(1);
        seq["a_hat"].push_back(0);
        seq["b"].push_back(n * n);
        seq["b_hat"].push_back(0);
        seq["c"].push_back(0);
        seq["c_hat"].push_back(std::to_string(n + 1) + "/1");
    }
    auto bad = temp_file("opm_cli_bad_sequences.json", seq.dump());
    json r = call_json({"harness", "--sequences", bad.string()}, 1);
    const json* sys = find_check(r, "system");
    REQUIRE(sys);
    CHECK(sys->at("status") == "fail");
    CHECK(sys->at("detail").get<std::string>().rfind("(e4, n = 2)", 0) == 0);

    // the Poisson sequences themselves pass
    for (int n = 0; n < 25; ++n)
        seq["b"][static_cast<std::size_t>(n)] = n;
    auto good = temp_file("opm_cli_good_sequences.json", seq.dump());
    call_json({"harness", "--sequences", good.string(), "--stu", "1,2,4"}, 0);
    // asking for more indices than the file holds is a usage error
    CHECK(call({"harness", "--sequences", good.string(), "--n", "40"}).code == 2);
}

TEST_CASE("qh-coeffs: symbolic identities and branch")
{
    json r = call_json({"qh-coeffs", "--process", "q-wiener"}, 0);
    CHECK(r.at("data").at("symbolic").at("branch") == "generic");
    CHECK(r.at("data").at("symbolic").at("D") == "0");
    CHECK(find_check(r, "identities_exact")->at("status") == "pass");
}

TEST_CASE("kernel: tolerance decides the exit code")
{
    call_json({"kernel", "--process", "q-ou", "--q", "1/2", "--alpha", "1"}, 0);
    // slow geometric decay at rho = 0.9 needs far more than K = 60 terms
    json slow = call_json({"kernel", "--process", "q-wiener", "--q", "0.7", "--rho", "0.9", "--y", "1"}, 1);
    CHECK(slow.at("data").at("sup_error").get<double>() > 1e-3);
    call_json({"kernel", "--process", "q-wiener", "--q", "0.7", "--rho", "0.9", "--y", "1", "--K", "400"}, 0);
}

TEST_CASE("simulate: CSV header and determinism")
{
    std::vector<std::string> args = {"simulate", "--process", "q-ou", "--q", "1/2", "--alpha", "1",
                                     "--paths", "50",    "--seed",    "3",   "--format", "csv"};
    Out a = call(args), b = call(args);
    CHECK(a.code == 0);
    CHECK(a.out.rfind("path_id,time,value\n", 0) == 0);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 1 + 50 * 3);
    CHECK(a.out == b.out);
    args[10] = "4";
    CHECK(call(args).out != a.out);
}

TEST_CASE("simulate: Monte Carlo reports")
{
    json r = call_json({"simulate", "--process", "poisson", "--mu", "1", "--paths", "20000", "--seed", "5"}, 0);
    CHECK(r.at("data").at("mc_reports").size() == 5);
    for (const auto& m : r.at("data").at("mc_reports")) {
        CHECK(m.at("seed").get<std::uint64_t>() > 0);
        CHECK(m.at("pass") == true);
    }
}

TEST_CASE("config file with flag overrides")
{
    auto cfg = temp_file("opm_cli_config.json", R"({"process": "q-ou", "q": "1/2", "alpha": 1, "format": "pretty"})");
    json r = call_json({"harness", "--config", cfg.string(), "--q", "0.3", "--stu", "0,0.5,1"}, 0);
    CHECK(r.at("data").at("harness").at("lambda") == "13/10");
    Out pretty = call({"opm-check", "--config", cfg.string()});
    CHECK(pretty.code == 0);
    CHECK(pretty.out.find("[PASS] diagonal") != std::string::npos);
}

TEST_CASE("usage and config errors exit with 2")
{
    CHECK(call({}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"structural", "--format", "xml"}).code == 2);
    CHECK(call({"structural", "--process", "brownian"}).code == 2);
    CHECK(call({"structural", "--q", "3/0"}).code == 2);
    CHECK(call({"structural", "--q", "2"}).code == 2);
    CHECK(call({"harness", "--process", "poisson", "--alpha", "1"}).code == 2);
    CHECK(call({"harness", "--process", "q-wiener", "--stu", "1,2,4"}).code == 2); // q unbound
    CHECK(call({"harness", "--process", "poisson", "--mu", "1", "--stu", "2,1,4"}).code == 2);
    CHECK(call({"kernel", "--process", "poisson", "--mu", "1"}).code == 2);
    CHECK(call({"structural", "--config", "/nonexistent/opm.json"}).code == 2);
    CHECK(call({"structural", "--tol", "kernel"}).code == 2);
    Out help = call({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("verify-all") != std::string::npos);
}

TEST_CASE("failed checks always carry a detail")
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"structural", "--process", "q-wiener", "--q", "0"},
             {"kernel", "--process", "q-wiener", "--q", "0.7", "--rho", "0.9"}}) {
        json r = call_json(args, 1);
        for (const auto& c : r.at("checks"))
            if (c.at("status") == "fail")
                CHECK(!c.at("detail").get<std::string>().empty());
    }
}

TEST_CASE("verify-all default run passes")
{
    json r = call_json({"verify-all"}, 0);
    CHECK(r.at("data").at("params").at("q") == "1/2");
    CHECK(find_check(r, "golden")->at("status") == "pass");
    CHECK(r.at("checks").size() == 10);
}
