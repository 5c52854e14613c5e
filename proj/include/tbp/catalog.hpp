#pragma once

#include "tbp/precision.hpp"

#include <string>
#include <vector>

namespace tbp {

// One converged orbit as persisted in the catalog. All numbers are decimal
// strings; no binary floats touch the disk.
struct Solution {
    std::string id;
    std::string vx, vy, T, T_star;
    std::string word;        // canonical free-group word; "?" = inconclusive
    int k = 0;               // satellite power, 0 = not a figure-eight satellite
    bool classified = false; // word/k/choreography filled in
    bool choreography = false;
    std::string stability; // "", "stable", "unstable", "inconclusive"
    int agreed_digits = 0; // digits agreed between the verification regimes
    std::string provenance;
    int dedup_group = -1;
    bool group_head = false;
};

std::string solution_to_json_line(const Solution &s);
Solution solution_from_json_line(const std::string &line);

std::vector<Solution> read_solutions(const std::string &path);
// Atomic write (temp file + rename), one JSON record per line.
void write_solutions(const std::string &path, const std::vector<Solution> &solutions);
void append_solution(const std::string &path, const Solution &s);

// Group solutions whose T* agree to relative tolerance 1e-12; within a group
// the head is the smallest (vx, vy). Returns the number of distinct groups.
int dedup_solutions(std::vector<Solution> &solutions);

} // namespace tbp
