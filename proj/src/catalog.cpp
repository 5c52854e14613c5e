#include "tbp/catalog.hpp"

#include "tbp/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace tbp {

namespace {

using nlohmann::json;

json to_json(const Solution &s)
{
    return json{{"id", s.id},
                {"vx", s.vx},
                {"vy", s.vy},
                {"T", s.T},
                {"T_star", s.T_star},
                {"word", s.word},
                {"k", s.k},
                {"classified", s.classified},
                {"choreography", s.choreography},
                {"stability", s.stability},
                {"agreed_digits", s.agreed_digits},
                {"provenance", s.provenance},
                {"dedup_group", s.dedup_group},
                {"group_head", s.group_head}};
}

Solution from_json(const json &j)
{
    Solution s;
    s.id = j.at("id").get<std::string>();
    s.vx = j.at("vx").get<std::string>();
    s.vy = j.at("vy").get<std::string>();
    s.T = j.at("T").get<std::string>();
    s.T_star = j.at("T_star").get<std::string>();
    s.word = j.value("word", std::string());
    s.k = j.value("k", 0);
    s.classified = j.value("classified", false);
    s.choreography = j.value("choreography", false);
    s.stability = j.value("stability", std::string());
    s.agreed_digits = j.value("agreed_digits", 0);
    s.provenance = j.value("provenance", std::string());
    s.dedup_group = j.value("dedup_group", -1);
    s.group_head = j.value("group_head", false);
    return s;
}

} // namespace

std::string solution_to_json_line(const Solution &s)
{
    return to_json(s).dump();
}

Solution solution_from_json_line(const std::string &line)
{
    return from_json(json::parse(line));
}

std::vector<Solution> read_solutions(const std::string &path)
{
    std::vector<Solution> out;
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        out.push_back(solution_from_json_line(line));
    }
    return out;
}

void write_solutions(const std::string &path, const std::vector<Solution> &solutions)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw io_error("cannot write " + tmp);
        }
        for (const auto &s : solutions) {
            out << solution_to_json_line(s) << "\n";
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw io_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

void append_solution(const std::string &path, const Solution &s)
{
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw io_error("cannot append to " + path);
    }
    out << solution_to_json_line(s) << "\n";
    out.flush();
}

int dedup_solutions(std::vector<Solution> &solutions)
{
    const int cmp_digits = 40;
    struct Entry {
        std::size_t idx;
        BigReal t_star, vx, vy;
    };
    std::vector<Entry> entries;
    entries.reserve(solutions.size());
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        entries.push_back({i, parse_decimal(solutions[i].T_star, cmp_digits),
                           parse_decimal(solutions[i].vx, cmp_digits),
                           parse_decimal(solutions[i].vy, cmp_digits)});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry &a, const Entry &b) { return a.t_star < b.t_star; });

    const BigReal rel_tol("1e-12");
    int group = -1;
    BigReal group_ref;
    std::vector<std::vector<std::size_t>> groups;
    for (const auto &e : entries) {
        bool fresh = group < 0;
        if (!fresh) {
            BigReal scale = abs(group_ref) > 1 ? abs(group_ref) : BigReal(1);
            fresh = abs(e.t_star - group_ref) > rel_tol * scale;
        }
        if (fresh) {
            ++group;
            groups.emplace_back();
            group_ref = e.t_star;
        }
        groups.back().push_back(e.idx);
        solutions[e.idx].dedup_group = group;
        solutions[e.idx].group_head = false;
    }
    // Head: smallest vx, then vy.
    for (const auto &g : groups) {
        std::size_t head = g.front();
        for (std::size_t idx : g) {
            BigReal hvx = parse_decimal(solutions[head].vx, cmp_digits);
            BigReal ivx = parse_decimal(solutions[idx].vx, cmp_digits);
            if (ivx < hvx
                || (ivx == hvx
                    && parse_decimal(solutions[idx].vy, cmp_digits)
                           < parse_decimal(solutions[head].vy, cmp_digits))) {
                head = idx;
            }
        }
        solutions[head].group_head = true;
    }
    return static_cast<int>(groups.size());
}

} // namespace tbp
