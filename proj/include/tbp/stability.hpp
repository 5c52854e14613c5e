#pragma once

#include "tbp/model.hpp"
#include "tbp/precision.hpp"

#include <array>
#include <string>

namespace tbp {

enum class Stability { Stable, Unstable, Inconclusive };

struct StabilityReport {
    std::array<double, 12> eigen_magnitudes{}; // sorted descending
    double max_deviation = 0;                  // max | |lambda| - 1 |
    Stability verdict = Stability::Inconclusive;
    std::string method = "monodromy";
    double det_error = 0;    // | det(M) - 1 |, determinant in full precision
    bool pairing_ok = false; // spectrum closed under lambda -> 1/lambda
    int unit_count = 0;      // eigenvalues within 1e-4 of the unit circle
    std::string message;
};

// Floquet-style verdict from the monodromy spectrum. Stable iff all
// eigenvalue magnitudes sit within `tol` (default 1e-3) of the unit circle.
// Fewer than 4 near-unit multipliers, a failed eigensolve, or an integration
// failure give Inconclusive.
StabilityReport classify_stability(const SearchPoint &p, const PrecisionCtx &ctx,
                                   double tol = 1e-3);

// Heuristic cross-check for Inconclusive cases: integrate a 1e-20
// perturbation over 10 periods and watch the proximity growth.
StabilityReport long_run_check(const SearchPoint &p, const PrecisionCtx &ctx);

const char *stability_name(Stability s);
Stability stability_from_name(const std::string &name);

} // namespace tbp
