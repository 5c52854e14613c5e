#include "tbp/classifier.hpp"
#include "tbp/corrector.hpp"
#include "tbp/taylor.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace tbp;
using namespace tbp::testing;

namespace {

const PrecisionCtx ctx = PrecisionCtx::for_digits(40);

SearchPoint perturbed_fig8(const char *delta)
{
    BigReal d = make_real(delta, ctx);
    return {make_real(kFig8Vx, ctx) + d, make_real(kFig8Vy, ctx) + d,
            make_real(kFig8T, ctx) + d};
}

} // namespace

TEST_CASE("default tolerance follows the precision context")
{
    ScopedPrecision sp(PrecisionCtx::for_digits(134));
    CorrectorConfig cc;
    CHECK(close_rel(corrector_tolerance(cc, PrecisionCtx::for_digits(40)),
                    pow(BigReal(10), -26), 30));
    CHECK(close_rel(corrector_tolerance(cc, PrecisionCtx::for_digits(134)),
                    pow(BigReal(10), -120), 30));
    cc.tol = pow(BigReal(10), -9);
    cc.tol_set = true;
    CHECK(corrector_tolerance(cc, PrecisionCtx::for_digits(40)) == cc.tol);
}

TEST_CASE("CANM converges from a perturbed figure-eight seed")
{
    ScopedPrecision sp(ctx);
    ConvergenceReport rep = correct(perturbed_fig8("1e-4"), ctx, CorrectorConfig{});
    REQUIRE(rep.verdict == Verdict::Converged);
    CHECK(rep.iterations <= 10);
    // Oracle: the returned triplet really is periodic — re-integrate and
    // compare endpoint to the initial state directly.
    State12 u0 = initial_state(rep.solution, ctx);
    State12 uT = integrate(u0, rep.solution.T, ctx);
    CHECK(proximity(uT, u0) < pow(BigReal(10), -25));
    CHECK(close_rel(rep.solution.vx, make_real(kFig8Vx, ctx), 19));
    CHECK(close_rel(rep.solution.T, make_real(kFig8T, ctx), 19));
}

TEST_CASE("classic Newton agrees with CANM on a good seed")
{
    ScopedPrecision sp(ctx);
    CorrectorConfig classic;
    classic.mode = CorrectorMode::Classic;
    ConvergenceReport a = correct(perturbed_fig8("1e-6"), ctx, classic);
    ConvergenceReport b = correct(perturbed_fig8("1e-6"), ctx, CorrectorConfig{});
    REQUIRE(a.verdict == Verdict::Converged);
    REQUIRE(b.verdict == Verdict::Converged);
    CHECK(close_rel(a.solution.vx, b.solution.vx, 24));
    CHECK(close_rel(a.solution.vy, b.solution.vy, 24));
    CHECK(close_rel(a.solution.T, b.solution.T, 24));
}

TEST_CASE("residual norms decay monotonically near the solution")
{
    ScopedPrecision sp(ctx);
    ConvergenceReport rep = correct(perturbed_fig8("1e-5"), ctx, CorrectorConfig{});
    REQUIRE(rep.verdict == Verdict::Converged);
    REQUIRE(rep.norm_history.size() >= 2);
    for (std::size_t i = 1; i < rep.norm_history.size(); ++i) {
        CHECK(rep.norm_history[i] < rep.norm_history[i - 1]);
    }
    // Quadratic tail: the final contraction must be far stronger than linear.
    const auto &h = rep.norm_history;
    CHECK(h.back() / h[h.size() - 2] < pow(BigReal(10), -5));
}

TEST_CASE("newton_step is small and well-predicted near the solution")
{
    ScopedPrecision sp(ctx);
    SearchPoint near = perturbed_fig8("1e-8");
    NewtonStep st = newton_step(near, ctx);
    // The correction must be of the order of the seed error.
    CHECK(abs(st.dvx) < pow(BigReal(10), -6));
    CHECK(abs(st.dvy) < pow(BigReal(10), -6));
    CHECK(abs(st.dT) < pow(BigReal(10), -6));
    // The 12x3 linear model is solvable to a small least-squares residual.
    CHECK(st.predicted_norm < pow(BigReal(10), -10));
}

TEST_CASE("a collapsing seed reports the collision verdict")
{
    ScopedPrecision sp(ctx);
    SearchPoint p{BigReal(0), BigReal(0), make_real("10", ctx)};
    ConvergenceReport rep = correct(p, ctx, CorrectorConfig{});
    CHECK(rep.verdict == Verdict::Collision);
}

TEST_CASE("a far-off seed does not falsely converge")
{
    ScopedPrecision sp(ctx);
    CorrectorConfig cc;
    cc.max_iters = 6;
    SearchPoint p{make_real("0.75", ctx), make_real("0.2", ctx), make_real("40", ctx)};
    ConvergenceReport rep = correct(p, ctx, cc);
    CHECK(rep.verdict != Verdict::Converged);
}

TEST_CASE("verdict names round-trip")
{
    CHECK(std::string(verdict_name(Verdict::Converged)) == "converged");
    CHECK(std::string(verdict_name(Verdict::Diverged)) == "diverged");
    CHECK(std::string(verdict_name(Verdict::Degenerate)) == "degenerate");
    CHECK(std::string(verdict_name(Verdict::Collision)) == "collision");
}
