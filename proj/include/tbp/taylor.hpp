#pragma once

#include "tbp/linalg.hpp"
#include "tbp/model.hpp"
#include "tbp/precision.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace tbp {

// Taylor coefficients of the 12 state components about the current time,
// coeffs[c][k] = k-th coefficient of component c; coeffs[c][0] is the state.
struct TaylorJet {
    int order = 0;
    std::array<std::vector<BigReal>, 12> coeffs;
};

// One accepted step: the jet is valid on [t_start, t_start + h].
struct StepRecord {
    BigReal t_start;
    BigReal h;
    TaylorJet jet;
};

// State plus its sensitivities with respect to the family parameters.
struct VariationalState {
    State12 base;
    std::array<BigReal, 12> dvx;
    std::array<BigReal, 12> dvy;
};

// Called once per accepted step, before advancing. The record is only valid
// for the duration of the call; copy what you need.
using StepSink = std::function<void(const StepRecord &)>;

// Taylor coefficients of the solution about the current state, order p, via
// the automatic-differentiation recurrences of the operation graph
// (differences, squares, sums, power -3/2, products).
TaylorJet taylor_coeffs(const State12 &u, int order, const PrecisionCtx &ctx);

// Two-term step-size estimate from the top coefficient norms:
// h = safety * min((1/|C_{p-1}|)^(1/(p-1)), (1/|C_p|)^(1/p)).
// Default safety is e^-2. Throws step_underflow_error below 10^-digits.
BigReal choose_step(const TaylorJet &jet, const PrecisionCtx &ctx,
                    const BigReal *safety = nullptr);

// Horner evaluation of the jet polynomials at offset tau in [0, h].
State12 dense_eval(const StepRecord &rec, const BigReal &tau);

// Integrate to t_end, shortening the final step to land exactly on t_end.
State12 integrate(const State12 &u0, const BigReal &t_end, const PrecisionCtx &ctx,
                  const StepSink &sink = StepSink());
State12 integrate(const SearchPoint &p0, const BigReal &t_end, const PrecisionCtx &ctx,
                  const StepSink &sink = StepSink());

// Same, collecting the whole step trace (memory-heavy at high order).
std::pair<State12, std::vector<StepRecord>> integrate_trace(const SearchPoint &p0,
                                                            const BigReal &t_end,
                                                            const PrecisionCtx &ctx);

// 36-component run: state plus tangents along d/dvx and d/dvy, with the exact
// initial sensitivities of the family (d vx3/d vx = -2 etc).
VariationalState integrate_variational(const SearchPoint &p0, const BigReal &t_end,
                                       const PrecisionCtx &ctx);

// State-transition matrix du(T)/du(0) over one period: 12 simultaneous
// tangent integrations with unit initial tangent vectors.
SmallMatrix monodromy(const SearchPoint &p0, const BigReal &T, const PrecisionCtx &ctx);

} // namespace tbp
