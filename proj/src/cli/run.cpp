#include "opm/cli.hpp"

#include "opm/errors.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

namespace opm::cli {

namespace {

// Raw flag values; only flags that were actually given override the config.
struct Flags {
    std::string config, process, q, alpha, mu, output, format, check, sequences;
    int n = 0, K = 0;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::vector<double> stu, times;
    std::vector<std::string> tol;
    bool mc = false;
    double rho = 0, y = 0;
};

void add_flags(CLI::App* sc, Flags& f)
{
    sc->add_option("--config", f.config, "JSON file mirroring the run configuration; flags override it");
    sc->add_option("--process", f.process, "q-wiener, q-ou or poisson");
    sc->add_option("--q", f.q, "q in (-1, 1], as p/q or a decimal");
    sc->add_option("--alpha", f.alpha, "OU rate alpha > 0");
    sc->add_option("--mu", f.mu, "Poisson rate mu > 0");
    sc->add_option("--n", f.n, "matrix size (structural) or largest index");
    sc->add_option("--stu", f.stu, "times s,t,u")->delimiter(',')->expected(3);
    sc->add_option("--times", f.times, "observation times for simulate")->delimiter(',');
    sc->add_option("--paths", f.paths, "Monte Carlo paths");
    sc->add_option("--seed", f.seed, "random seed");
    sc->add_option("--format", f.format, "json, csv or pretty");
    sc->add_option("--output", f.output, "write to this file instead of stdout");
    sc->add_option("--check", f.check, "structural: all, semigroup or independence");
    sc->add_option("--sequences", f.sequences, "JSON file with arrays a, a_hat, b, b_hat, c, c_hat");
    sc->add_flag("--mc", f.mc, "add Monte Carlo checks");
    sc->add_option("--rho", f.rho, "kernel correlation rho in (0, 1)");
    sc->add_option("--y", f.y, "kernel conditioning value");
    sc->add_option("--K", f.K, "kernel truncation");
    sc->add_option("--tol", f.tol, "tolerance override name=value (repeatable)");
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        return j.get<RunConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config '" + path + "': " + e.what());
    }
}

RunConfig merge(const CLI::App& sc, const Flags& f)
{
    RunConfig c = sc.count("--config") ? load_config(f.config) : RunConfig{};
    auto given = [&](const char* name) { return sc.count(name) > 0; };
    if (given("--process"))
        c.process = f.process;
    if (given("--q"))
        c.q = f.q;
    if (given("--alpha"))
        c.alpha = f.alpha;
    if (given("--mu"))
        c.mu = f.mu;
    if (given("--n"))
        c.n = f.n;
    if (given("--stu"))
        c.stu = std::array<double, 3>{f.stu[0], f.stu[1], f.stu[2]};
    if (given("--times"))
        c.times = f.times;
    if (given("--paths"))
        c.paths = f.paths;
    if (given("--seed"))
        c.seed = f.seed;
    if (given("--format"))
        c.format = f.format;
    if (given("--output"))
        c.output = f.output;
    if (given("--check"))
        c.check = f.check;
    if (given("--sequences"))
        c.sequences = f.sequences;
    if (given("--mc"))
        c.mc = f.mc;
    if (given("--rho"))
        c.rho = f.rho;
    if (given("--y"))
        c.y = f.y;
    if (given("--K"))
        c.K = f.K;
    for (const auto& t : f.tol) {
        auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--tol expects name=value, got '" + t + "'");
        try {
            c.tolerance[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad tolerance value in '" + t + "'");
        }
    }
    if (c.format != "json" && c.format != "csv" && c.format != "pretty")
        throw ConfigError("--format must be json, csv or pretty");
    return c;
}

void emit(std::ostream& os, const Report& r, const std::string& format)
{
    if (format == "json")
        os << nlohmann::json(r).dump(2) << "\n";
    else if (format == "csv")
        print_csv(os, r);
    else
        print_pretty(os, r);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Structural matrices, harness checks and simulation for Markov processes with polynomial moments",
                 "opmtool"};
    app.require_subcommand(1, 1);
    Flags f;
    const std::pair<const char*, const char*> commands[] = {
        {"structural", "structural matrix V_n(t), semigroup and independence checks"},
        {"opm-check", "orthogonal martingale polynomial check"},
        {"harness", "harness parameters, the five recursions and A..F at --stu"},
        {"qh-coeffs", "symbolic quadratic harness coefficients"},
        {"kernel", "kernel expansion against the closed-form transition density"},
        {"simulate", "sample paths (--format csv) or Monte Carlo checks"},
        {"verify-all", "every check for one process"},
    };
    for (const auto& [name, desc] : commands)
        add_flags(app.add_subcommand(name, desc), f);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }
    const CLI::App& sc = *app.get_subcommands().front();
    const std::string cmd = sc.get_name();
    try {
        RunConfig c = merge(sc, f);
        std::ofstream file;
        std::ostream* os = &out;
        if (!c.output.empty()) {
            file.open(c.output);
            if (!file)
                throw ConfigError("cannot write '" + c.output + "'");
            os = &file;
        }
        auto t0 = std::chrono::steady_clock::now();
        Report r;
        if (cmd == "simulate" && c.format == "csv")
            return cmd_simulate(c, os).ok() ? 0 : 1;
        if (cmd == "structural")
            r = cmd_structural(c);
        else if (cmd == "opm-check")
            r = cmd_opm_check(c);
        else if (cmd == "harness")
            r = cmd_harness(c);
        else if (cmd == "qh-coeffs")
            r = cmd_qh_coeffs(c);
        else if (cmd == "kernel")
            r = cmd_kernel(c);
        else if (cmd == "simulate")
            r = cmd_simulate(c);
        else
            r = cmd_verify_all(c);
        r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        emit(*os, r, c.format);
        return r.ok() ? 0 : 1;
    } catch (const ConfigError& e) {
        err << "opmtool " << cmd << ": " << e.what() << "\n";
        return 2;
    } catch (const UnboundSymbol& e) {
        err << "opmtool " << cmd << ": " << e.what() << " (give the parameter on the command line)\n";
        return 2;
    } catch (const std::exception& e) {
        err << "opmtool " << cmd << ": " << e.what() << "\n";
        return 1;
    }
}

} // namespace opm::cli
