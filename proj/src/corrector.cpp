#include "tbp/corrector.hpp"

#include "tbp/errors.hpp"

namespace tbp {

BigReal corrector_tolerance(const CorrectorConfig &cfg, const PrecisionCtx &ctx)
{
    if (cfg.tol_set) {
        return cfg.tol;
    }
    return pow10(-(ctx.decimal_digits - 14), ctx);
}

std::pair<Residual, SmallMatrix> residual_and_jacobian(const SearchPoint &p,
                                                       const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    const State12 u0 = initial_state(p, ctx);
    const VariationalState vs = integrate_variational(p, p.T, ctx);

    Residual res;
    BigReal n2 = 0;
    for (int c = 0; c < 12; ++c) {
        res.F[c] = vs.base.c[c] - u0.c[c];
        n2 += res.F[c] * res.F[c];
    }
    res.norm = sqrt(n2);

    // Initial sensitivities of the family (see seed in the variational run).
    std::array<BigReal, 12> dvx0{}, dvy0{};
    dvx0[2] = 1;
    dvx0[6] = 1;
    dvx0[10] = -2;
    dvy0[3] = 1;
    dvy0[7] = 1;
    dvy0[11] = -2;

    const State12 du = derivative(vs.base, ctx);
    SmallMatrix J(12, 3);
    for (int c = 0; c < 12; ++c) {
        J(c, 0) = vs.dvx[c] - dvx0[c];
        J(c, 1) = vs.dvy[c] - dvy0[c];
        J(c, 2) = du.c[c];
    }
    return {res, J};
}

NewtonStep newton_step(const SearchPoint &p, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    auto [res, J] = residual_and_jacobian(p, ctx);
    Vec rhs(12);
    for (int c = 0; c < 12; ++c) {
        rhs[c] = -res.F[c];
    }
    LsqResult ls = qr_least_squares(J, rhs, ctx);
    return NewtonStep{ls.x[0], ls.x[1], ls.x[2], ls.residual_norm};
}

ConvergenceReport correct(const SearchPoint &p0, const PrecisionCtx &ctx,
                          const CorrectorConfig &cfg)
{
    ScopedPrecision sp(ctx);
    const BigReal tol = corrector_tolerance(cfg, ctx);

    ConvergenceReport rep;
    rep.solution = p0;

    SearchPoint p{p0.vx, p0.vy, p0.T};
    BigReal tau = 1;
    BigReal prev_norm;
    BigReal cap;
    bool have_cap = false;

    for (int k = 0; k < cfg.max_iters; ++k) {
        Residual res;
        SmallMatrix J(12, 3);
        try {
            auto rj = residual_and_jacobian(p, ctx);
            res = rj.first;
            J = rj.second;
        } catch (const collision_error &e) {
            rep.verdict = Verdict::Collision;
            rep.message = e.what();
            return rep;
        } catch (const step_underflow_error &e) {
            rep.verdict = Verdict::Collision;
            rep.message = e.what();
            return rep;
        }
        rep.norm_history.push_back(res.norm);
        rep.iterations = k;
        rep.solution = p;

        if (!have_cap) {
            cap = cfg.divergence_factor * res.norm;
            have_cap = true;
        }
        if (res.norm < tol) {
            rep.verdict = Verdict::Converged;
            return rep;
        }
        if (res.norm > cap && res.norm > tol) {
            rep.verdict = Verdict::Diverged;
            rep.message = "norm exceeded divergence cap";
            return rep;
        }

        if (cfg.mode == CorrectorMode::Canm && k > 0) {
            tau = tau * (prev_norm / res.norm);
            if (tau < cfg.tau_min) {
                tau = cfg.tau_min;
            }
            if (tau > 1) {
                tau = 1;
            }
        } else if (cfg.mode == CorrectorMode::Classic) {
            tau = 1;
        }
        prev_norm = res.norm;

        Vec rhs(12);
        for (int c = 0; c < 12; ++c) {
            rhs[c] = -res.F[c];
        }
        LsqResult ls;
        try {
            ls = qr_least_squares(J, rhs, ctx);
        } catch (const rank_deficient_error &e) {
            rep.verdict = Verdict::Degenerate;
            rep.message = e.what();
            return rep;
        }
        p.vx += tau * ls.x[0];
        p.vy += tau * ls.x[1];
        p.T += tau * ls.x[2];
        // Seeds come with a period estimate that is already approximately
        // right (e.g. from a return-proximity scan), so a candidate whose
        // period collapses below the search domain or triples has left the
        // basin of any orbit near the seed; each further iteration only makes
        // the integration longer, so cut the attempt off here.
        if (p.T < 1 || p.T > 3 * p0.T) {
            rep.verdict = Verdict::Diverged;
            rep.message = "period estimate left plausible range";
            return rep;
        }
    }
    rep.verdict = Verdict::Diverged;
    rep.message = "max iterations reached";
    return rep;
}

const char *verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::Converged:
        return "converged";
    case Verdict::Diverged:
        return "diverged";
    case Verdict::Degenerate:
        return "degenerate";
    case Verdict::Collision:
        return "collision";
    }
    return "unknown";
}

} // namespace tbp
