#pragma once

#include "tbp/model.hpp"
#include "tbp/precision.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tbp {

// Exact rational grid step ("1/4096"), kept as a fraction so grid nodes are
// reproducible without decimal rounding.
struct Fraction {
    long long num = 1;
    long long den = 2048;

    static Fraction parse(const std::string &s);
    std::string str() const;
    BigReal value(const PrecisionCtx &ctx) const;
};

struct SearchWindow {
    BigReal vx_lo, vx_hi;
    BigReal vy_lo, vy_hi;
    Fraction grid_step;
    BigReal t0 = 70;
    BigReal threshold = BigReal("0.7");

    void validate() const; // throws std::invalid_argument
};

struct ReturnProx {
    BigReal t_ret;
    BigReal p_ret;
};

// Outcome of one grid node; status "ok", "collision" or "underflow".
struct NodeOutcome {
    int i = 0, j = 0;
    std::string status;
    BigReal t_ret;
    BigReal p_ret;
};

struct Candidate {
    int i = 0, j = 0;
    BigReal vx, vy;
    BigReal t_ret;
    BigReal p_ret;
};

struct ScanResult {
    int nx = 0, ny = 0; // node counts per axis
    std::vector<NodeOutcome> nodes;
    std::vector<Candidate> candidates;
    long failures = 0;
};

// min of P(t) over t in (1, T0]: coarse minimum over accepted-step endpoints,
// then golden-section refinement on the dense polynomials of the bracketing
// steps, to time tolerance 1e-12.
ReturnProx return_proximity(const BigReal &vx, const BigReal &vy, const BigReal &t0,
                            const PrecisionCtx &ctx);

// Evaluate every grid node, keep nodes below the proximity threshold that are
// also minimal among their (up to 8) grid neighbors. Deterministic output
// ordered by (vx, vy), independent of the worker count. When a checkpoint
// path is given, per-node outcomes are persisted and reloaded on resume.
ScanResult scan(const SearchWindow &window, const PrecisionCtx &ctx, int workers = 1,
                const std::string &checkpoint_path = std::string());

// Grid node value: lo + index * step, computed in working precision.
BigReal grid_value(const BigReal &lo, int index, const Fraction &step, const PrecisionCtx &ctx);

} // namespace tbp
