#pragma once

#include "tbp/linalg.hpp"
#include "tbp/model.hpp"
#include "tbp/precision.hpp"
#include "tbp/taylor.hpp"

#include <string>
#include <vector>

namespace tbp {

// Periodicity defect F = u(T) - u(0) and its Euclidean norm.
struct Residual {
    std::array<BigReal, 12> F;
    BigReal norm;
};

enum class CorrectorMode { Classic, Canm };

struct CorrectorConfig {
    CorrectorMode mode = CorrectorMode::Canm;
    int max_iters = 50;
    // Convergence tolerance; when unset (empty) defaults to 10^-(digits-14).
    BigReal tol;
    bool tol_set = false;
    BigReal tau_min = BigReal("0.05");
    // Divergence once the norm exceeds divergence_factor * initial norm.
    BigReal divergence_factor = 1000;
};

enum class Verdict { Converged, Diverged, Degenerate, Collision };

struct ConvergenceReport {
    Verdict verdict = Verdict::Diverged;
    SearchPoint solution;
    int iterations = 0;
    std::vector<BigReal> norm_history;
    std::string message;
};

struct NewtonStep {
    BigReal dvx, dvy, dT;
    BigReal predicted_norm; // least-squares residual of the linear model
};

// F = u(T)-u(0) and the 12x3 Jacobian: columns d/dvx, d/dvy (from the
// variational run, minus the initial-condition sensitivities) and du(T)/dt.
std::pair<Residual, SmallMatrix> residual_and_jacobian(const SearchPoint &p,
                                                       const PrecisionCtx &ctx);

// One least-squares Newton correction: (dvx, dvy, dT) = argmin |J d + F|.
NewtonStep newton_step(const SearchPoint &p, const PrecisionCtx &ctx);

// Damped Newton iteration. Classic mode: tau = 1. CANM mode: tau_0 = 1,
// tau_k = clamp(tau_{k-1} * |F_{k-1}| / |F_k|, tau_min, 1).
ConvergenceReport correct(const SearchPoint &p0, const PrecisionCtx &ctx,
                          const CorrectorConfig &cfg);

BigReal corrector_tolerance(const CorrectorConfig &cfg, const PrecisionCtx &ctx);

const char *verdict_name(Verdict v);

} // namespace tbp
