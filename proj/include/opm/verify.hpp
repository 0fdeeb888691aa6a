#pragma once

#include "opm/trimatrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace opm {

// One acceptance criterion evaluated end to end.
struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::size_t mc_paths = 100000;
    std::uint64_t seed = 7;
};

constexpr int kCriteria = 10;

std::string criterion_title(int id);
// Never throws; an exception inside a check becomes a failure with its message.
CriterionResult run_criterion(int id, const VerifyOptions& opt = {});

// Published 6x6 structural tables with symbolic q: the q-Wiener V(t) and
// the time-free factor K of the OU matrix V(t) = K diag(exp(-k alpha t)).
TriMatrix golden_qwiener_v6();
TriMatrix golden_ou_k6();

} // namespace opm
