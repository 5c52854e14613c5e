#pragma once

#include "tbp/catalog.hpp"
#include "tbp/corrector.hpp"
#include "tbp/precision.hpp"
#include "tbp/scanner.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace tbp {

struct Regime {
    int digits = 192;
    int order = 220;
    PrecisionCtx ctx() const { return {digits, order}; }
};

// Full pipeline configuration. Numeric fields that must be exact (window
// bounds, grid step, thresholds) are decimal / fraction strings.
struct PipelineConfig {
    // window
    std::string vx_lo = "0", vx_hi = "0";
    std::string vy_lo = "0", vy_hi = "0";
    std::string step = "1/2048";
    std::string t0 = "70";
    std::string threshold = "0.7";

    Regime scan{32, 40};
    Regime correct{134, 154};
    std::vector<Regime> verify{{192, 220}, {231, 264}};
    Regime classify{64, 74};

    std::string corrector_mode = "canm";
    int max_iters = 50;
    std::string tau_min = "0.05";

    int workers = 1;
    std::string output_dir = "out";
    bool resume = true;
    int export_stride = 2048;

    void validate() const; // throws std::invalid_argument
    std::string to_json_string() const;
    static PipelineConfig from_json_string(const std::string &text);
    static PipelineConfig from_json_file(const std::string &path);
    std::uint64_t hash() const;

    SearchWindow window(const PrecisionCtx &ctx) const;
    CorrectorConfig corrector_config(const PrecisionCtx &ctx) const;
    std::string provenance() const;

    std::string candidates_path() const { return output_dir + "/candidates.jsonl"; }
    std::string scan_checkpoint_path() const { return output_dir + "/scan_checkpoint.jsonl"; }
    std::string reports_path() const { return output_dir + "/reports.jsonl"; }
    std::string solutions_path() const { return output_dir + "/solutions.jsonl"; }
    std::string catalog_path() const { return output_dir + "/catalog.jsonl"; }
};

// Stage commands; each returns a process exit code (0 ok, 2 usage/config
// error, 3 I/O error) and prints a short summary to stdout.
int cmd_scan(const PipelineConfig &cfg);
int cmd_refine(const PipelineConfig &cfg);
int cmd_classify(const PipelineConfig &cfg);
int cmd_stability(const PipelineConfig &cfg);
int cmd_dedup(const PipelineConfig &cfg);
int cmd_export_table(const PipelineConfig &cfg, const std::string &out_path);
int cmd_export_trajectory(const PipelineConfig &cfg, const std::string &solution_id,
                          const std::string &out_path);
int cmd_run(const PipelineConfig &cfg);

struct VerifyOutcome {
    bool converged = false;
    int agreed_digits = 0;
    std::vector<std::array<std::string, 3>> triplets; // (vx, vy, T) per regime
};

// The two-regime verification protocol: re-polish a triplet with classic
// Newton at each regime (seeding each regime with the previous result) and
// count the leading decimal digits on which consecutive regimes agree.
VerifyOutcome verify_triplet(const std::string &vx, const std::string &vy, const std::string &T,
                             const std::vector<Regime> &regimes);

// Correct one candidate and polish it through the verification regimes.
// Returns an unclassified Solution on convergence.
struct RefineOutcome {
    Verdict verdict = Verdict::Diverged;
    int iterations = 0;
    Solution solution;
};
RefineOutcome refine_candidate(const Candidate &cand, const PipelineConfig &cfg);

} // namespace tbp
