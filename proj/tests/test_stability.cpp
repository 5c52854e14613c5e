#include "tbp/stability.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace tbp;
using namespace tbp::testing;

namespace {

const PrecisionCtx ctx = PrecisionCtx::for_digits(40);

SearchPoint fig8()
{
    return {make_real(kFig8Vx, ctx), make_real(kFig8Vy, ctx), make_real(kFig8T, ctx)};
}

} // namespace

TEST_CASE("figure-eight is linearly stable")
{
    ScopedPrecision sp(ctx);
    StabilityReport r = classify_stability(fig8(), ctx);
    CHECK(r.verdict == Stability::Stable);
    CHECK(r.max_deviation < 1e-3);
    CHECK(r.pairing_ok);
    CHECK(r.unit_count >= 4);
    CHECK(std::abs(r.det_error) < 1e-8);
    REQUIRE(r.eigen_magnitudes.size() == 12);
    // magnitudes sorted descending
    for (std::size_t i = 1; i < 12; ++i) {
        CHECK(r.eigen_magnitudes[i] <= r.eigen_magnitudes[i - 1]);
    }
}

TEST_CASE("the non-choreographic neighbor orbit is unstable")
{
    ScopedPrecision sp(ctx);
    // Found by this pipeline next to the figure-eight (same T* to 6 digits).
    SearchPoint p{make_real("0.33940741199085883468548161e0", ctx),
                  make_real("0.53618497815142346876810994e0", ctx),
                  make_real("0.62908187650759827242834274e1", ctx)};
    StabilityReport r = classify_stability(p, ctx);
    CHECK(r.verdict == Stability::Unstable);
    CHECK(r.max_deviation > 1e-3);
    CHECK(std::abs(r.det_error) < 1e-8);
    CHECK(r.eigen_magnitudes.front() > 1.0);
}

TEST_CASE("long-run drift check accepts the figure-eight")
{
    ScopedPrecision sp(ctx);
    StabilityReport r = long_run_check(fig8(), ctx);
    CHECK(r.verdict == Stability::Stable);
}

TEST_CASE("stability names round-trip")
{
    CHECK(std::string(stability_name(Stability::Stable)) == "stable");
    CHECK(stability_from_name("unstable") == Stability::Unstable);
    CHECK(stability_from_name("inconclusive") == Stability::Inconclusive);
    CHECK_THROWS_AS(stability_from_name("bogus"), std::invalid_argument);
}
