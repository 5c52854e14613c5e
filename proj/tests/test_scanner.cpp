#include "tbp/scanner.hpp"
#include "tbp/taylor.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace tbp;
using namespace tbp::testing;

namespace {

const PrecisionCtx ctx = PrecisionCtx::for_digits(32);

// 5x5 grid straddling the figure-eight basin.
SearchWindow fig8_window()
{
    SearchWindow w;
    w.vx_lo = make_real("0.33984375", ctx); // 87/256
    w.vx_hi = make_real("0.35546875", ctx); // 91/256
    w.vy_lo = make_real("0.52734375", ctx); // 135/256
    w.vy_hi = make_real("0.54296875", ctx); // 139/256
    w.grid_step = Fraction::parse("1/256");
    w.t0 = make_real("10", ctx);
    w.threshold = make_real("0.7", ctx);
    return w;
}

std::string tmp_path(const char *name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("fractions parse, print and evaluate")
{
    Fraction f = Fraction::parse("1/4096");
    CHECK(f.num == 1);
    CHECK(f.den == 4096);
    CHECK(f.str() == "1/4096");
    ScopedPrecision sp(ctx);
    CHECK(f.value(ctx) * 4096 == 1);
    CHECK_THROWS_AS(Fraction::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Fraction::parse("x"), std::invalid_argument);
    CHECK_THROWS_AS(Fraction::parse("-1/4"), std::invalid_argument);
}

TEST_CASE("grid nodes are exact rational points")
{
    ScopedPrecision sp(ctx);
    Fraction step = Fraction::parse("1/2048");
    BigReal lo = make_real("0.1", ctx);
    BigReal v = grid_value(lo, 3, step, ctx);
    CHECK((v - lo) * 2048 == 3);
}

TEST_CASE("window validation rejects malformed input")
{
    ScopedPrecision sp(ctx);
    SearchWindow w = fig8_window();
    w.vx_hi = w.vx_lo - 1;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
    w = fig8_window();
    w.t0 = make_real(".5", ctx); // proximity scans (1, T0]
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
    w = fig8_window();
    w.vx_hi = make_real("1.5", ctx);
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}

TEST_CASE("return proximity of the figure-eight point is near zero at T")
{
    ScopedPrecision sp(ctx);
    ReturnProx r = return_proximity(make_real(kFig8Vx, ctx), make_real(kFig8Vy, ctx),
                                    make_real("10", ctx), ctx);
    CHECK(r.p_ret < pow(BigReal(10), -8));
    CHECK(close_rel(r.t_ret, make_real(kFig8T, ctx), 8));
}

TEST_CASE("scan finds the figure-eight basin and is worker-invariant")
{
    ScopedPrecision sp(ctx);
    SearchWindow w = fig8_window();
    ScanResult r1 = scan(w, ctx, 1);
    CHECK(r1.nx == 5);
    CHECK(r1.ny == 5);
    CHECK(r1.nodes.size() == 25);
    CHECK(r1.failures == 0);
    REQUIRE(!r1.candidates.empty());
    // Every candidate must be below threshold and a local minimum by scan's
    // contract; check the threshold part independently.
    for (const auto &c : r1.candidates) {
        CHECK(c.p_ret < w.threshold);
    }

    ScanResult r3 = scan(w, ctx, 3);
    REQUIRE(r3.candidates.size() == r1.candidates.size());
    for (std::size_t k = 0; k < r1.candidates.size(); ++k) {
        CHECK(r1.candidates[k].i == r3.candidates[k].i);
        CHECK(r1.candidates[k].j == r3.candidates[k].j);
        CHECK(r1.candidates[k].t_ret == r3.candidates[k].t_ret);
        CHECK(r1.candidates[k].p_ret == r3.candidates[k].p_ret);
    }
}

TEST_CASE("checkpointed scans resume to identical results")
{
    ScopedPrecision sp(ctx);
    SearchWindow w = fig8_window();
    const std::string cp = tmp_path("tbp_test_scan_checkpoint.jsonl");
    std::filesystem::remove(cp);

    ScanResult full = scan(w, ctx, 1, cp);
    CHECK(std::filesystem::exists(cp));

    // Truncate the checkpoint to simulate an interrupted run, then resume.
    std::vector<std::string> lines;
    {
        std::ifstream in(cp);
        std::string line;
        while (std::getline(in, line)) {
            lines.push_back(line);
        }
    }
    REQUIRE(lines.size() == 25);
    {
        std::ofstream out(cp, std::ios::trunc);
        for (std::size_t k = 0; k < 10; ++k) {
            out << lines[k] << "\n";
        }
        out << "{\"torn"; // partial trailing write must be tolerated
    }
    ScanResult resumed = scan(w, ctx, 1, cp);
    REQUIRE(resumed.candidates.size() == full.candidates.size());
    for (std::size_t k = 0; k < full.candidates.size(); ++k) {
        CHECK(resumed.candidates[k].i == full.candidates[k].i);
        CHECK(resumed.candidates[k].t_ret == full.candidates[k].t_ret);
        CHECK(resumed.candidates[k].p_ret == full.candidates[k].p_ret);
    }
    std::filesystem::remove(cp);
}

TEST_CASE("nodes that end in collision are counted as failures, not candidates")
{
    ScopedPrecision sp(ctx);
    SearchWindow w;
    // A corner of parameter space where orbits collapse quickly.
    w.vx_lo = BigReal(0);
    w.vx_hi = make_real("0.00390625", ctx); // 1/256
    w.vy_lo = BigReal(0);
    w.vy_hi = make_real("0.00390625", ctx);
    w.grid_step = Fraction::parse("1/256");
    w.t0 = make_real("5", ctx);
    w.threshold = make_real("0.7", ctx);
    ScanResult r = scan(w, ctx, 1);
    CHECK(r.nodes.size() == 4);
    CHECK(r.failures > 0);
    for (const auto &c : r.candidates) {
        CHECK(c.p_ret < w.threshold); // any survivors must still be valid
    }
}
