#pragma once

#include "json.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opm::cli {

struct Check {
    std::string name;
    std::string status; // "pass", "fail", "skip"
    std::string detail;
    std::optional<double> residual;

    friend bool operator==(const Check&, const Check&) = default;
};

struct Report {
    std::string command;
    std::vector<Check> checks;
    double timing_ms = 0.0;
    nlohmann::json data = nlohmann::json::object(); // command-specific payload

    bool ok() const;
    friend bool operator==(const Report&, const Report&) = default;
};

void to_json(nlohmann::json& j, const Check& c);
void from_json(const nlohmann::json& j, Check& c);
void to_json(nlohmann::json& j, const Report& r);
void from_json(const nlohmann::json& j, Report& r);

void print_pretty(std::ostream& os, const Report& r);
void print_csv(std::ostream& os, const Report& r);

// Numbers stay strings until a command needs them, so "1/2" is exact.
struct RunConfig {
    std::string process = "q-wiener";
    std::optional<std::string> q, alpha, mu;
    std::optional<int> n;
    std::map<std::string, double> tolerance;
    std::string output;
    std::string format = "pretty";
    std::uint64_t seed = 7;
    std::size_t paths = 100000;
    std::optional<std::array<double, 3>> stu;
    std::vector<double> times;
    std::string check = "all";
    std::string sequences;
    bool mc = false;
    double rho = 0.3;
    double y = 0.0;
    int K = 60;

    double tol(const std::string& name, double fallback) const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

// Command implementations; ConfigError signals a usage problem.
Report cmd_structural(const RunConfig& c);
Report cmd_opm_check(const RunConfig& c);
Report cmd_harness(const RunConfig& c);
Report cmd_qh_coeffs(const RunConfig& c);
Report cmd_kernel(const RunConfig& c);
Report cmd_simulate(const RunConfig& c, std::ostream* csv = nullptr);
Report cmd_verify_all(const RunConfig& c);

// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace opm::cli
