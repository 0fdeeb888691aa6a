#pragma once

#include "opm/orthopoly.hpp"
#include "opm/trimatrix.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace opm {

enum class ProcessName { qWiener, alphaQOU, Poisson, custom };

std::string to_string(ProcessName p);

// Interval of times; nullopt stands for an infinite end.
struct IndexSet {
    std::optional<Rational> left, right;
    bool contains(double t) const;
};

// Time enters polynomials through the symbol "t" and, for processes with
// exponential time dependence, through "E_t" = exp(alpha t).
struct ProcessSpec {
    ProcessName name = ProcessName::custom;
    PolyFamily family; // orthogonal polynomials of the marginal
    std::map<std::string, Rational> params;
    IndexSet index_set;
    // custom processes only: martingale polynomials M_0..M_n in x, t
    std::vector<MPoly> martingales;
};

ProcessSpec q_wiener(std::optional<Rational> q = std::nullopt);
ProcessSpec alpha_q_ou(std::optional<Rational> q = std::nullopt, std::optional<Rational> alpha = std::nullopt);
ProcessSpec poisson(std::optional<Rational> mu = std::nullopt);
ProcessSpec custom_process(PolyFamily family, std::vector<MPoly> martingales, IndexSet index_set = {});

// Polynomial martingales M_0..M_n in x with coefficients in t.
std::vector<MPoly> martingale_polys(const ProcessSpec& spec, int n);

// Moves a polynomial from time symbol `from` to `to` (t -> s, E_t -> E_s).
MPoly retime(const MPoly& p, const std::string& from, const std::string& to);
TriMatrix retime(const TriMatrix& m, const std::string& from, const std::string& to);

struct StructuralMatrix {
    int n = 0;
    TriMatrix V; // in "t"
    TriMatrix C; // V^{-1}, the martingale coefficient matrix
    ProcessSpec spec;
};

StructuralMatrix structural_matrix(const ProcessSpec& spec, int n);

// A(s,t) = V(t) V(s)^{-1} with symbolic times.
TriMatrix regression_matrix(const StructuralMatrix& v, const std::string& s = "s", const std::string& t = "t");

// Numeric bindings for the process parameters and the time symbol `sym`
// at value `t` (sets E_sym = exp(alpha t) when alpha is known).  Symbolic
// parameters are taken from `extra`.
std::map<std::string, double> time_bindings(const ProcessSpec& spec, double t, const std::string& sym = "t",
                                            const std::map<std::string, double>& extra = {});

// A(s,t) at numbers.
NumMatrix regression_matrix_at(const StructuralMatrix& v, double s, double t,
                               const std::map<std::string, double>& extra = {});

// M_n(t) = E X^(n) X^(n)^T = C^{-1} diag(phat) C^{-T}
TriMatrix moment_matrix(const ProcessSpec& spec, int n);

// Parameter/time points at which positivity claims are tested.
std::vector<std::map<std::string, double>> sample_points(const ProcessSpec& spec);

struct OpmResult {
    bool is_opm = false;
    bool diagonal = false;
    bool positive = false;
    TriMatrix G; // V^{-1} M V^{-T}
    std::vector<MPoly> P; // diagonal of G
};
OpmResult opm_check(const ProcessSpec& spec, int n);

struct IndependenceResult {
    bool independent = true;
    // g_d for every offset d at which the rows agree (all d when independent)
    std::map<int, MPoly> g;
    std::optional<std::pair<int, int>> witness; // first violating (i, j)
    std::vector<std::pair<int, int>> violations;
    // false when the index set has no finite left end and g_d(l) = 0 was skipped
    bool endpoint_checked = false;
};
// Scans offsets d = 1.. and rows i = d..n in that order.  With a finite left
// endpoint l the matrix is first normalised to V(t) V(l)^{-1}.
IndependenceResult independent_increments_check(const StructuralMatrix& v);

// Row n of A(s,t) applied to (1, y, ..., y^n): E(X_t^n | X_s = y).
MPoly conditional_moment(const ProcessSpec& spec, int n, const std::string& s = "s", const std::string& t = "t",
                         const std::string& y = "y");

struct StationaryForm {
    bool holds = false;
    TriMatrix D; // V(0)
};
// V(t) = V(0) diag(E_t^{-k})
StationaryForm stationary_form_check(const StructuralMatrix& v);

// Largest entry above the diagonal of (A(s,t) M(s))^T M(t)^{-1}, relative to
// the largest entry of the matrix; zero when reversed regressions are
// polynomial of matching degree.
double podst_defect(const ProcessSpec& spec, int n, double s, double t, const std::map<std::string, double>& extra = {});

} // namespace opm
