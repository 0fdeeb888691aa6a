#include "opm/cli.hpp"

#include "opm/errors.hpp"

#include <algorithm>
#include <ostream>

namespace opm::cli {

using nlohmann::json;

bool Report::ok() const
{
    return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == "fail"; });
}

void to_json(json& j, const Check& c)
{
    j = json{{"name", c.name}, {"status", c.status}, {"detail", c.detail}};
    j["residual"] = c.residual ? json(*c.residual) : json(nullptr);
}

void from_json(const json& j, Check& c)
{
    j.at("name").get_to(c.name);
    j.at("status").get_to(c.status);
    j.at("detail").get_to(c.detail);
    if (j.contains("residual") && !j.at("residual").is_null())
        c.residual = j.at("residual").get<double>();
    else
        c.residual.reset();
}

void to_json(json& j, const Report& r)
{
    j = json{{"command", r.command}, {"checks", r.checks}, {"timing_ms", r.timing_ms}, {"data", r.data}};
}

void from_json(const json& j, Report& r)
{
    j.at("command").get_to(r.command);
    j.at("checks").get_to(r.checks);
    j.at("timing_ms").get_to(r.timing_ms);
    r.data = j.value("data", json::object());
}

namespace {

std::string scalar(const json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

bool is_table(const json& v)
{
    if (!v.is_array() || v.empty())
        return false;
    for (const auto& row : v)
        if (!row.is_array() || !std::all_of(row.begin(), row.end(), [](const json& e) { return e.is_string(); }))
            return false;
    return true;
}

void print_table(std::ostream& os, const json& rows)
{
    std::vector<std::size_t> width;
    for (const auto& row : rows)
        for (std::size_t j = 0; j < row.size(); ++j) {
            width.resize(std::max(width.size(), row.size()), 0);
            width[j] = std::max(width[j], row[j].get<std::string>().size());
        }
    for (const auto& row : rows) {
        os << "  [";
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::string s = row[j].get<std::string>();
            os << (j ? "  " : " ") << std::string(width[j] - s.size(), ' ') << s;
        }
        os << " ]\n";
    }
}

} // namespace

void print_pretty(std::ostream& os, const Report& r)
{
    os << r.command << "\n";
    for (auto it = r.data.begin(); it != r.data.end(); ++it) {
        const json& v = it.value();
        if (is_table(v)) {
            os << it.key() << ":\n";
            print_table(os, v);
        } else if (v.is_object()) {
            os << it.key() << ":\n";
            for (auto jt = v.begin(); jt != v.end(); ++jt)
                os << "  " << jt.key() << " = " << scalar(jt.value()) << "\n";
        } else if (v.is_array() && !v.empty() && v.front().is_object()) {
            os << it.key() << ": " << v.size() << " record(s)\n";
        } else {
            os << it.key() << ": " << scalar(v) << "\n";
        }
    }
    for (const auto& c : r.checks) {
        std::string tag = c.status == "pass" ? "PASS" : c.status == "fail" ? "FAIL" : "SKIP";
        os << "[" << tag << "] " << c.name;
        if (c.residual)
            os << " (residual " << *c.residual << ")";
        if (!c.detail.empty())
            os << ": " << c.detail;
        os << "\n";
    }
    os << (r.ok() ? "all checks passed" : "some checks failed") << " in " << r.timing_ms << " ms\n";
}

void print_csv(std::ostream& os, const Report& r)
{
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char ch : s)
            q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    };
    os << "command,name,status,residual,detail\n";
    for (const auto& c : r.checks) {
        os << r.command << ',' << quote(c.name) << ',' << c.status << ',';
        if (c.residual)
            os << *c.residual;
        os << ',' << quote(c.detail) << '\n';
    }
}

double RunConfig::tol(const std::string& name, double fallback) const
{
    auto it = tolerance.find(name);
    return it == tolerance.end() ? fallback : it->second;
}

void to_json(json& j, const RunConfig& c)
{
    j = json{{"process", c.process}, {"format", c.format},   {"output", c.output}, {"seed", c.seed},
             {"paths", c.paths},     {"check", c.check},     {"mc", c.mc},         {"rho", c.rho},
             {"y", c.y},             {"K", c.K},             {"times", c.times},   {"tolerance", c.tolerance},
             {"sequences", c.sequences}};
    if (c.q)
        j["q"] = *c.q;
    if (c.alpha)
        j["alpha"] = *c.alpha;
    if (c.mu)
        j["mu"] = *c.mu;
    if (c.n)
        j["n"] = *c.n;
    if (c.stu)
        j["stu"] = *c.stu;
}

void from_json(const json& j, RunConfig& c)
{
    static const std::vector<std::string> known = {"process", "q",     "alpha", "mu", "n",   "tolerance", "output",
                                                   "format",  "seed",  "paths", "stu", "times", "check",  "sequences",
                                                   "mc",      "rho",   "y",     "K"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown config key '" + it.key() + "'");
    // numbers may be given as JSON numbers or as strings such as "1/2"
    auto num = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key))
            return std::nullopt;
        const json& v = j.at(key);
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    c.process = j.value("process", c.process);
    c.q = num("q");
    c.alpha = num("alpha");
    c.mu = num("mu");
    if (j.contains("n"))
        c.n = j.at("n").get<int>();
    c.tolerance = j.value("tolerance", c.tolerance);
    c.output = j.value("output", c.output);
    c.format = j.value("format", c.format);
    c.seed = j.value("seed", c.seed);
    c.paths = j.value("paths", c.paths);
    if (j.contains("stu"))
        c.stu = j.at("stu").get<std::array<double, 3>>();
    c.times = j.value("times", c.times);
    c.check = j.value("check", c.check);
    c.sequences = j.value("sequences", c.sequences);
    c.mc = j.value("mc", c.mc);
    c.rho = j.value("rho", c.rho);
    c.y = j.value("y", c.y);
    c.K = j.value("K", c.K);
}

} // namespace opm::cli
