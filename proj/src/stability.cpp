#include "tbp/stability.hpp"

#include "tbp/errors.hpp"
#include "tbp/linalg.hpp"
#include "tbp/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace tbp {

StabilityReport classify_stability(const SearchPoint &p, const PrecisionCtx &ctx, double tol)
{
    StabilityReport rep;
    rep.method = "monodromy";

    SmallMatrix M(12, 12);
    try {
        M = monodromy(p, p.T, ctx);
    } catch (const collision_error &e) {
        rep.message = e.what();
        return rep;
    } catch (const step_underflow_error &e) {
        rep.message = e.what();
        return rep;
    }
    rep.det_error = std::abs(static_cast<double>(qr_determinant(M, ctx)) - 1.0);

    std::array<std::complex<double>, 12> eig;
    try {
        eig = eigenvalues_12(M);
    } catch (const eigen_no_convergence_error &e) {
        rep.message = e.what();
        return rep;
    }

    for (int i = 0; i < 12; ++i) {
        rep.eigen_magnitudes[i] = std::abs(eig[i]);
    }
    std::sort(rep.eigen_magnitudes.begin(), rep.eigen_magnitudes.end(), std::greater<>());
    rep.max_deviation = 0;
    rep.unit_count = 0;
    for (double m : rep.eigen_magnitudes) {
        rep.max_deviation = std::max(rep.max_deviation, std::abs(m - 1.0));
        if (std::abs(m - 1.0) < 1e-4) {
            ++rep.unit_count;
        }
    }

    // Hamiltonian monodromy: spectrum closed under lambda -> 1/lambda.
    rep.pairing_ok = true;
    for (const auto &l : eig) {
        const std::complex<double> inv = 1.0 / l;
        double best = 1e300;
        for (const auto &m : eig) {
            best = std::min(best, std::abs(m - inv));
        }
        if (best > 1e-5 * std::max(1.0, std::abs(inv))) {
            rep.pairing_ok = false;
        }
    }

    // Time translation plus the conserved quantities force at least four
    // trivial unit multipliers; missing them flags integration inaccuracy.
    if (rep.unit_count < 4) {
        rep.verdict = Stability::Inconclusive;
        rep.message = "fewer than 4 near-unit multipliers";
        return rep;
    }
    rep.verdict = rep.max_deviation < tol ? Stability::Stable : Stability::Unstable;
    return rep;
}

StabilityReport long_run_check(const SearchPoint &p, const PrecisionCtx &ctx)
{
    StabilityReport rep;
    rep.method = "long-run";
    ScopedPrecision sp(ctx);
    try {
        const BigReal eps = BigReal("1e-20");
        State12 u0 = initial_state(p, ctx);
        State12 ref = u0;
        State12 pert = u0;
        pert.vx(0) += eps;

        State12 ref_T = integrate(ref, 10 * p.T, ctx);
        State12 pert_T = integrate(pert, 10 * p.T, ctx);
        BigReal growth = proximity(pert_T, ref_T) / eps;
        rep.max_deviation = static_cast<double>(growth);
        // A linearly stable orbit grows at most polynomially over 10 periods.
        rep.verdict = growth < BigReal("1e6") ? Stability::Stable : Stability::Unstable;
    } catch (const std::exception &e) {
        rep.message = e.what();
        rep.verdict = Stability::Inconclusive;
    }
    return rep;
}

const char *stability_name(Stability s)
{
    switch (s) {
    case Stability::Stable:
        return "stable";
    case Stability::Unstable:
        return "unstable";
    case Stability::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

Stability stability_from_name(const std::string &name)
{
    if (name == "stable") {
        return Stability::Stable;
    }
    if (name == "unstable") {
        return Stability::Unstable;
    }
    if (name == "inconclusive") {
        return Stability::Inconclusive;
    }
    throw std::invalid_argument("unknown stability verdict: " + name);
}

} // namespace tbp
