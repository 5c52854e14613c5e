#include "tbp/catalog.hpp"
#include "tbp/errors.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace tbp;
using namespace tbp::testing;

namespace {

Solution make_sol(const std::string &id, const RefOrbit &row)
{
    Solution s;
    s.id = id;
    s.vx = row.vx;
    s.vy = row.vy;
    s.T = row.T;
    s.T_star = row.T_star;
    s.k = row.k;
    s.word = "abAB";
    s.classified = true;
    s.choreography = true;
    s.stability = "stable";
    s.agreed_digits = 17;
    s.provenance = "test";
    return s;
}

std::string tmp_path(const char *name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("solutions round-trip through JSON lines")
{
    Solution s = make_sol("r1", kRefOrbits[0]);
    s.dedup_group = 4;
    s.group_head = true;
    Solution back = solution_from_json_line(solution_to_json_line(s));
    CHECK(back.id == s.id);
    CHECK(back.vx == s.vx);
    CHECK(back.T_star == s.T_star);
    CHECK(back.k == s.k);
    CHECK(back.word == s.word);
    CHECK(back.classified == s.classified);
    CHECK(back.choreography == s.choreography);
    CHECK(back.stability == s.stability);
    CHECK(back.agreed_digits == 17);
    CHECK(back.dedup_group == 4);
    CHECK(back.group_head);
    CHECK(back.provenance == "test");
}

TEST_CASE("file round-trip preserves order and content")
{
    const std::string path = tmp_path("tbp_test_catalog.jsonl");
    std::vector<Solution> sols;
    for (std::size_t i = 0; i < kRefOrbits.size(); ++i) {
        sols.push_back(make_sol("r" + std::to_string(i + 1), kRefOrbits[i]));
    }
    write_solutions(path, sols);
    std::vector<Solution> back = read_solutions(path);
    REQUIRE(back.size() == sols.size());
    for (std::size_t i = 0; i < sols.size(); ++i) {
        CHECK(back[i].id == sols[i].id);
        CHECK(back[i].T_star == sols[i].T_star);
    }
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_solutions(path), io_error);
}

TEST_CASE("append accumulates entries")
{
    const std::string path = tmp_path("tbp_test_append.jsonl");
    std::filesystem::remove(path);
    append_solution(path, make_sol("a", kRefOrbits[0]));
    append_solution(path, make_sol("b", kRefOrbits[1]));
    auto back = read_solutions(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "a");
    CHECK(back[1].id == "b");
    std::filesystem::remove(path);
}

TEST_CASE("dedup groups equal T* and elects heads")
{
    // Published rows: 2-3 share T*, 4-5 share T*; 1 vs 2 differ in digit 8,
    // 8 vs 9 differ in digit 5.
    std::vector<Solution> sols;
    for (std::size_t i = 0; i < kRefOrbits.size(); ++i) {
        sols.push_back(make_sol("r" + std::to_string(i + 1), kRefOrbits[i]));
    }
    int groups = dedup_solutions(sols);
    CHECK(groups == 7);
    auto by_id = [&](const std::string &id) -> const Solution & {
        for (const auto &s : sols) {
            if (s.id == id) {
                return s;
            }
        }
        throw std::runtime_error("missing " + id);
    };
    CHECK(by_id("r2").dedup_group == by_id("r3").dedup_group);
    CHECK(by_id("r4").dedup_group == by_id("r5").dedup_group);
    CHECK(by_id("r1").dedup_group != by_id("r2").dedup_group);
    CHECK(by_id("r8").dedup_group != by_id("r9").dedup_group);
    // exactly one head per group, and it is the lexicographically smallest
    // (vx, vy) member — row 2 has smaller vx than row 3
    CHECK(by_id("r2").group_head);
    CHECK_FALSE(by_id("r3").group_head);
    CHECK(by_id("r4").group_head);
    CHECK_FALSE(by_id("r5").group_head);
    int heads = 0;
    for (const auto &s : sols) {
        heads += s.group_head ? 1 : 0;
    }
    CHECK(heads == groups);
}

TEST_CASE("malformed catalog lines are rejected")
{
    const std::string path = tmp_path("tbp_test_badcat.jsonl");
    {
        std::ofstream out(path, std::ios::trunc);
        out << "{not json\n";
    }
    CHECK_THROWS(read_solutions(path));
    std::filesystem::remove(path);
}
