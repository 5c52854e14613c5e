#include "tbp/errors.hpp"
#include "tbp/model.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace tbp;
using tbp::testing::close_rel;

namespace {

const PrecisionCtx ctx = PrecisionCtx::for_digits(40);

SearchPoint point(const char *vx, const char *vy, const char *T)
{
    return {make_real(vx, ctx), make_real(vy, ctx), make_real(T, ctx)};
}

} // namespace

TEST_CASE("initial_state lays out the symmetric configuration")
{
    ScopedPrecision sp(ctx);
    SearchPoint p = point("0.3", "0.5", "10");
    State12 u = initial_state(p, ctx);
    CHECK(u.x(0) == -1);
    CHECK(u.y(0) == 0);
    CHECK(u.x(1) == 1);
    CHECK(u.x(2) == 0);
    CHECK(u.vx(0) == u.vx(1));
    CHECK(u.vy(0) == u.vy(1));
    CHECK(u.vx(2) == -2 * u.vx(0));
    CHECK(u.vy(2) == -2 * u.vy(0));
}

TEST_CASE("family energy matches first-principles sum")
{
    ScopedPrecision sp(ctx);
    SearchPoint p = point("0.3", "0.5", "10");
    State12 u = initial_state(p, ctx);
    // Oracle: kinetic + potential summed directly from the state.
    BigReal kin(0);
    for (int b = 0; b < 3; ++b) {
        kin += (u.vx(b) * u.vx(b) + u.vy(b) * u.vy(b)) / 2;
    }
    BigReal pot(0);
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            BigReal dx = u.x(i) - u.x(j), dy = u.y(i) - u.y(j);
            pot -= 1 / sqrt(dx * dx + dy * dy);
        }
    }
    CHECK(close_rel(energy(p, ctx), kin + pot, 38));
    CHECK(close_rel(conserved_quantities(u, ctx).energy, kin + pot, 38));
}

TEST_CASE("the family has zero angular and linear momentum")
{
    ScopedPrecision sp(ctx);
    State12 u = initial_state(point("0.37", "0.11", "1"), ctx);
    Conserved c = conserved_quantities(u, ctx);
    CHECK(abs(c.angular_momentum) < pow(BigReal(10), -38));
    CHECK(abs(c.px) < pow(BigReal(10), -38));
    CHECK(abs(c.py) < pow(BigReal(10), -38));
}

TEST_CASE("derivative on the Lagrange equilateral configuration")
{
    ScopedPrecision sp(ctx);
    // Bodies on a circle of radius 1 (side sqrt(3)): each acceleration points
    // at the center with magnitude 1/sqrt(3).
    State12 u;
    BigReal half = make_real("0.5", ctx);
    BigReal s3 = sqrt(BigReal(3));
    BigReal zero(0);
    for (auto &v : u.c) {
        v = zero;
    }
    u.x(0) = 1;
    u.x(1) = -half;
    u.y(1) = s3 / 2;
    u.x(2) = -half;
    u.y(2) = -s3 / 2;
    State12 du = derivative(u, ctx);
    for (int b = 0; b < 3; ++b) {
        // velocity slots of du carry the accelerations
        BigReal ax = du.vx(b), ay = du.vy(b);
        CHECK(close_rel(sqrt(ax * ax + ay * ay), 1 / s3, 36));
        // direction: toward the origin, i.e. a parallel to -r
        CHECK(abs(ax * u.y(b) - ay * u.x(b)) < pow(BigReal(10), -36));
    }
    // position slots carry the velocities
    CHECK(du.x(0) == u.vx(0));
    CHECK(du.y(2) == u.vy(2));
}

TEST_CASE("derivative throws on near-collision")
{
    ScopedPrecision sp(ctx);
    State12 u;
    for (auto &v : u.c) {
        v = BigReal(0);
    }
    u.x(0) = pow(BigReal(10), -30);
    u.x(1) = 1;
    CHECK_THROWS_AS(derivative(u, ctx), collision_error);
}

TEST_CASE("proximity is a metric-like distance")
{
    ScopedPrecision sp(ctx);
    State12 a = initial_state(point("0.3", "0.5", "1"), ctx);
    State12 b = a;
    CHECK(proximity(a, b) == 0);
    b.x(0) += 3;
    b.y(1) += 4;
    CHECK(close_rel(proximity(a, b), BigReal(5), 38));
    CHECK(close_rel(proximity(b, a), BigReal(5), 38));
}

TEST_CASE("state serialization round-trips")
{
    ScopedPrecision sp(ctx);
    State12 u = initial_state(point("0.29294799125543721", "0.52925901352413728", "1"), ctx);
    auto fields = serialize_state(u, 40);
    CHECK(fields.size() == 12);
    State12 back = deserialize_state(fields, ctx);
    CHECK(proximity(u, back) < pow(BigReal(10), -38));
}
