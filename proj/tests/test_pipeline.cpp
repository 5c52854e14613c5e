#include "tbp/pipeline.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace tbp;
using namespace tbp::testing;

namespace {

std::string tmp_dir(const char *name)
{
    auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(p);
    return p.string();
}

PipelineConfig tiny_fig8_config(const char *out_name)
{
    PipelineConfig cfg;
    cfg.vx_lo = "0.33984375";
    cfg.vx_hi = "0.35546875";
    cfg.vy_lo = "0.52734375";
    cfg.vy_hi = "0.54296875";
    cfg.step = "1/256";
    cfg.t0 = "10";
    cfg.scan = {32, 40};
    cfg.correct = {48, 56};
    cfg.verify.clear();
    cfg.classify = {40, 48};
    cfg.output_dir = tmp_dir(out_name);
    return cfg;
}

} // namespace

TEST_CASE("config JSON round-trips and hashes deterministically")
{
    PipelineConfig cfg;
    cfg.vx_lo = "0.1";
    cfg.vx_hi = "0.33";
    cfg.vy_lo = "0.49";
    cfg.vy_hi = "0.545";
    cfg.step = "1/4096";
    cfg.t0 = "300";
    PipelineConfig back = PipelineConfig::from_json_string(cfg.to_json_string());
    CHECK(back.vx_lo == cfg.vx_lo);
    CHECK(back.step == "1/4096");
    CHECK(back.correct.digits == 134);
    CHECK(back.correct.order == 154);
    CHECK(back.verify.size() == 2);
    CHECK(back.verify[1].digits == 231);
    CHECK(back.hash() == cfg.hash());
    back.t0 = "70";
    CHECK(back.hash() != cfg.hash());
}

TEST_CASE("config validation rejects bad settings")
{
    PipelineConfig cfg;
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = PipelineConfig{};
    cfg.step = "nonsense";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = PipelineConfig{};
    cfg.verify = {{231, 264}, {192, 220}}; // must be increasing
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = PipelineConfig{};
    cfg.corrector_mode = "bogus";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(PipelineConfig::from_json_string("{nope"), std::invalid_argument);
}

TEST_CASE("provenance names the regimes and config hash")
{
    PipelineConfig cfg;
    std::string p = cfg.provenance();
    CHECK(p.find("correct=134/154") != std::string::npos);
    CHECK(p.find("192/220") != std::string::npos);
    CHECK(p.find("231/264") != std::string::npos);
    CHECK(p.find("cfg=") != std::string::npos);
}

TEST_CASE("verify_triplet polishes the figure-eight across regimes")
{
    VerifyOutcome out = verify_triplet("0.34711688", "0.53272494", "6.3259139",
                                       {{40, 48}, {64, 74}});
    REQUIRE(out.converged);
    REQUIRE(out.triplets.size() == 2);
    // regime agreement is capped by the smaller regime (minus slack)
    CHECK(out.agreed_digits >= 24);
    // the final polish reproduces the pinned anchor
    PrecisionCtx ctx = PrecisionCtx::for_digits(64);
    ScopedPrecision sp(ctx);
    CHECK(close_rel(make_real(out.triplets[1][0], ctx), make_real(kFig8Vx, ctx), 19));
    CHECK(close_rel(make_real(out.triplets[1][2], ctx), make_real(kFig8T, ctx), 19));
}

TEST_CASE("scan/refine/classify/dedup pipeline on the figure-eight window")
{
    PipelineConfig cfg = tiny_fig8_config("tbp_test_pipe");
    REQUIRE(cmd_scan(cfg) == 0);
    REQUIRE(std::filesystem::exists(cfg.candidates_path()));
    REQUIRE(cmd_refine(cfg) == 0);
    std::vector<Solution> sols = read_solutions(cfg.solutions_path());
    REQUIRE(!sols.empty());
    for (const auto &s : sols) {
        CHECK_FALSE(s.classified);
        CHECK(s.agreed_digits >= 30);
        CHECK(s.provenance.find("correct=48/56") != std::string::npos);
    }
    REQUIRE(cmd_classify(cfg) == 0);
    REQUIRE(cmd_stability(cfg) == 0);
    REQUIRE(cmd_dedup(cfg) == 0);
    std::vector<Solution> cat = read_solutions(cfg.catalog_path());
    REQUIRE(cat.size() == sols.size());
    bool found_fig8 = false;
    for (const auto &s : cat) {
        CHECK(s.classified);
        CHECK_FALSE(s.stability.empty());
        CHECK(s.dedup_group >= 0);
        if (s.word == "abAB" && s.choreography && s.stability == "stable") {
            found_fig8 = true;
            PrecisionCtx ctx = PrecisionCtx::for_digits(40);
            ScopedPrecision sp(ctx);
            // the pinned anchor value carries ~20 digits
            CHECK(close_rel(make_real(s.T_star, ctx), make_real(kFig8TStar, ctx), 19));
        }
    }
    CHECK(found_fig8);

    SUBCASE("table export is sorted by T* and complete")
    {
        std::string table = cfg.output_dir + "/table.tsv";
        REQUIRE(cmd_export_table(cfg, table) == 0);
        std::ifstream in(table);
        std::string header;
        std::getline(in, header);
        CHECK(header.find("T_star") != std::string::npos);
        int rows = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) {
                ++rows;
            }
        }
        CHECK(rows == static_cast<int>(cat.size()));
    }

    SUBCASE("trajectory export samples the full period")
    {
        PipelineConfig tcfg = cfg;
        tcfg.export_stride = 16;
        std::string traj = cfg.output_dir + "/traj.txt";
        REQUIRE(cmd_export_trajectory(tcfg, cat.front().id, traj) == 0);
        std::ifstream in(traj);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) {
            lines.push_back(line);
        }
        REQUIRE(lines.size() == 17);
        // t x1 y1 x2 y2 x3 y3
        CHECK(lines.front().substr(0, 6) == "0.0e0 ");
        CHECK(cmd_export_trajectory(tcfg, "no_such_id", traj) == 2);
    }

    SUBCASE("refine resume skips completed candidates")
    {
        // Re-running refine must reuse reports.jsonl and leave results
        // byte-identical.
        auto before = read_solutions(cfg.solutions_path());
        REQUIRE(cmd_refine(cfg) == 0);
        auto after = read_solutions(cfg.solutions_path());
        REQUIRE(after.size() == before.size());
        for (std::size_t i = 0; i < after.size(); ++i) {
            CHECK(after[i].vx == before[i].vx);
            CHECK(after[i].T == before[i].T);
        }
    }

    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("refine without a candidates file is an I/O error")
{
    PipelineConfig cfg = tiny_fig8_config("tbp_test_noio");
    CHECK(cmd_refine(cfg) == 3);
    std::filesystem::remove_all(cfg.output_dir);
}
