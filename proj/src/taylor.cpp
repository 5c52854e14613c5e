#include "tbp/taylor.hpp"

#include "tbp/errors.hpp"
#include "taylor_core.hpp"

#include <stdexcept>

namespace tbp {

namespace {

using detail::Dual;
using detail::JetCore;

BigReal default_safety(const PrecisionCtx &ctx)
{
    return exp(BigReal(-2, static_cast<unsigned>(ctx.working_digits())));
}

// h = safety * min((1/n_{p-1})^(1/(p-1)), (1/n_p)^(1/p)); zero norms drop out.
BigReal two_term_step(const BigReal &n_pm1, const BigReal &n_p, int p, const BigReal &safety)
{
    BigReal h;
    bool have = false;
    if (n_pm1 > 0) {
        h = exp(-log(n_pm1) / (p - 1));
        have = true;
    }
    if (n_p > 0) {
        BigReal h2 = exp(-log(n_p) / p);
        if (!have || h2 < h) {
            h = h2;
        }
        have = true;
    }
    if (!have) {
        // Series truncates exactly; no curvature information. Take a plain
        // unit step scaled by safety.
        h = 1;
    }
    return h * safety;
}

template <class S, class PerStep>
void drive(JetCore<S> &core, const BigReal &t_end, const PrecisionCtx &ctx,
           const BigReal &safety, PerStep &&per_step)
{
    const int p = core.order();
    BigReal t = make_real(0, ctx);
    const BigReal floor = pow10(-ctx.decimal_digits, ctx);
    constexpr long kMaxSteps = 20000000;
    for (long n = 0;; ++n) {
        if (n >= kMaxSteps) {
            throw std::runtime_error("taylor: step cap exceeded");
        }
        try {
            core.compute_jet();
        } catch (const collision_error &) {
            throw collision_error(static_cast<double>(t));
        }
        BigReal h = two_term_step(core.coeff_norm(p - 1), core.coeff_norm(p), p, safety);
        bool last = false;
        BigReal rem = t_end - t;
        if (h >= rem) {
            h = rem;
            last = true;
        } else if (h < floor) {
            throw step_underflow_error(static_cast<double>(t));
        }
        per_step(core, t, h, last);
        core.advance(h);
        if (last) {
            break;
        }
        t += h;
    }
}

template <class S>
void load_state(JetCore<S> &core, const State12 &u)
{
    for (int c = 0; c < 12; ++c) {
        detail::sset(detail::base_mut(core.state(c)), u.c[static_cast<std::size_t>(c)]);
    }
}

State12 extract_state(const JetCore<BigReal> &core)
{
    State12 u;
    for (int c = 0; c < 12; ++c) {
        u.c[static_cast<std::size_t>(c)] = core.series(c)[0];
    }
    return u;
}

template <int N>
State12 extract_state(const JetCore<Dual<N>> &core)
{
    State12 u;
    for (int c = 0; c < 12; ++c) {
        u.c[static_cast<std::size_t>(c)] = core.series(c)[0].v;
    }
    return u;
}

// Sensitivities of the initial configuration w.r.t. (vx, vy):
// only the velocity slots are nonzero, body 3 carries the -2 factor.
void seed_family_tangents(JetCore<Dual<2>> &core)
{
    auto set = [&](int comp, int which, long val) {
        core.state(comp).d[static_cast<std::size_t>(which)] = val;
    };
    set(2, 0, 1);   // d vx1 / d vx
    set(6, 0, 1);   // d vx2 / d vx
    set(10, 0, -2); // d vx3 / d vx
    set(3, 1, 1);   // d vy1 / d vy
    set(7, 1, 1);   // d vy2 / d vy
    set(11, 1, -2); // d vy3 / d vy
}

} // namespace

TaylorJet taylor_coeffs(const State12 &u, int order, const PrecisionCtx &ctx)
{
    if (order < 1) {
        throw std::invalid_argument("taylor_coeffs: order must be positive");
    }
    ScopedPrecision sp(ctx);
    PrecisionCtx local = ctx;
    local.taylor_order = order;
    JetCore<BigReal> core(order, local);
    load_state(core, u);
    core.compute_jet();
    TaylorJet jet;
    jet.order = order;
    for (int c = 0; c < 12; ++c) {
        jet.coeffs[static_cast<std::size_t>(c)] = core.series(c);
    }
    return jet;
}

BigReal choose_step(const TaylorJet &jet, const PrecisionCtx &ctx, const BigReal *safety)
{
    if (jet.order < 4) {
        throw std::invalid_argument("choose_step: jet order must be >= 4");
    }
    ScopedPrecision sp(ctx);
    const int p = jet.order;
    BigReal n1 = 0, n2 = 0;
    for (int c = 0; c < 12; ++c) {
        BigReal a = abs(jet.coeffs[static_cast<std::size_t>(c)][static_cast<std::size_t>(p - 1)]);
        if (a > n1) {
            n1 = a;
        }
        a = abs(jet.coeffs[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)]);
        if (a > n2) {
            n2 = a;
        }
    }
    BigReal h = two_term_step(n1, n2, p, safety ? *safety : default_safety(ctx));
    if (h < pow10(-ctx.decimal_digits, ctx)) {
        throw step_underflow_error(0);
    }
    return h;
}

State12 dense_eval(const StepRecord &rec, const BigReal &tau)
{
    State12 u;
    const int p = rec.jet.order;
    for (int c = 0; c < 12; ++c) {
        const auto &s = rec.jet.coeffs[static_cast<std::size_t>(c)];
        BigReal v = s[static_cast<std::size_t>(p)];
        for (int k = p - 1; k >= 0; --k) {
            v = v * tau + s[static_cast<std::size_t>(k)];
        }
        u.c[static_cast<std::size_t>(c)] = v;
    }
    return u;
}

State12 integrate(const State12 &u0, const BigReal &t_end, const PrecisionCtx &ctx,
                  const StepSink &sink)
{
    ScopedPrecision sp(ctx);
    if (t_end < 0) {
        throw std::invalid_argument("integrate: t_end must be >= 0");
    }
    JetCore<BigReal> core(ctx.taylor_order, ctx);
    load_state(core, u0);
    const BigReal te = t_end;
    const BigReal safety = default_safety(ctx);

    StepRecord rec;
    if (sink) {
        rec.jet.order = ctx.taylor_order;
        for (auto &s : rec.jet.coeffs) {
            s.assign(static_cast<std::size_t>(ctx.taylor_order) + 1,
                     BigReal(0, static_cast<unsigned>(ctx.working_digits())));
        }
    }
    drive(core, te, ctx, safety,
          [&](JetCore<BigReal> &c, const BigReal &t, const BigReal &h, bool) {
              if (!sink) {
                  return;
              }
              rec.t_start = t;
              rec.h = h;
              for (int comp = 0; comp < 12; ++comp) {
                  const auto &src = c.series(comp);
                  auto &dst = rec.jet.coeffs[static_cast<std::size_t>(comp)];
                  for (std::size_t k = 0; k < src.size(); ++k) {
                      detail::sset(dst[k], src[k]);
                  }
              }
              sink(rec);
          });
    return extract_state(core);
}

State12 integrate(const SearchPoint &p0, const BigReal &t_end, const PrecisionCtx &ctx,
                  const StepSink &sink)
{
    return integrate(initial_state(p0, ctx), t_end, ctx, sink);
}

std::pair<State12, std::vector<StepRecord>> integrate_trace(const SearchPoint &p0,
                                                            const BigReal &t_end,
                                                            const PrecisionCtx &ctx)
{
    std::vector<StepRecord> trace;
    State12 final = integrate(p0, t_end, ctx, [&](const StepRecord &r) { trace.push_back(r); });
    return {final, trace};
}

VariationalState integrate_variational(const SearchPoint &p0, const BigReal &t_end,
                                       const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    JetCore<Dual<2>> core(ctx.taylor_order, ctx);
    load_state(core, initial_state(p0, ctx));
    seed_family_tangents(core);
    const BigReal safety = default_safety(ctx);
    drive(core, t_end, ctx, safety, [](JetCore<Dual<2>> &, const BigReal &, const BigReal &, bool) {});
    VariationalState out;
    out.base = extract_state(core);
    for (int c = 0; c < 12; ++c) {
        out.dvx[static_cast<std::size_t>(c)] = core.series(c)[0].d[0];
        out.dvy[static_cast<std::size_t>(c)] = core.series(c)[0].d[1];
    }
    return out;
}

SmallMatrix monodromy(const SearchPoint &p0, const BigReal &T, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    JetCore<Dual<12>> core(ctx.taylor_order, ctx);
    load_state(core, initial_state(p0, ctx));
    for (int c = 0; c < 12; ++c) {
        core.state(c).d[static_cast<std::size_t>(c)] = 1;
    }
    const BigReal safety = default_safety(ctx);
    drive(core, T, ctx, safety, [](JetCore<Dual<12>> &, const BigReal &, const BigReal &, bool) {});
    SmallMatrix M(12, 12);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            M(i, j) = core.series(i)[0].d[static_cast<std::size_t>(j)];
        }
    }
    return M;
}

} // namespace tbp
