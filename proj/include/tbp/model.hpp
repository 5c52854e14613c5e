#pragma once

#include "tbp/precision.hpp"

#include <array>
#include <string>
#include <vector>

namespace tbp {

// Phase vector u = (x1, y1, vx1, vy1, x2, y2, vx2, vy2, x3, y3, vx3, vy3).
// Component ordering is fixed for all serialization.
struct State12 {
    std::array<BigReal, 12> c{};

    BigReal &x(int body) { return c[4 * body]; }
    BigReal &y(int body) { return c[4 * body + 1]; }
    BigReal &vx(int body) { return c[4 * body + 2]; }
    BigReal &vy(int body) { return c[4 * body + 3]; }
    const BigReal &x(int body) const { return c[4 * body]; }
    const BigReal &y(int body) const { return c[4 * body + 1]; }
    const BigReal &vx(int body) const { return c[4 * body + 2]; }
    const BigReal &vy(int body) const { return c[4 * body + 3]; }
};

// Newton unknowns (vx, vy, T) of the one-parameter-family initial conditions.
struct SearchPoint {
    BigReal vx;
    BigReal vy;
    BigReal T;
};

struct Conserved {
    BigReal energy;
    BigReal angular_momentum;
    BigReal px;
    BigReal py;
};

// Symmetric zero-angular-momentum initial configuration:
// bodies at (-1,0), (1,0), (0,0); v1 = v2 = (vx, vy), v3 = (-2vx, -2vy).
State12 initial_state(const SearchPoint &p, const PrecisionCtx &ctx);

// du/dt of the first-order system: unit masses, unit gravitational constant.
// Throws collision_error when a pairwise distance drops below 10^(-digits/2).
State12 derivative(const State12 &u, const PrecisionCtx &ctx);

// Closed-form energy of the family's initial configuration.
BigReal energy(const SearchPoint &p, const PrecisionCtx &ctx);

// Energy, angular momentum and linear momenta of an arbitrary state.
Conserved conserved_quantities(const State12 &u, const PrecisionCtx &ctx);

// Full 12-dimensional Euclidean phase-space distance.
BigReal proximity(const State12 &u, const State12 &u0);

std::vector<std::string> serialize_state(const State12 &u, int digits);
State12 deserialize_state(const std::vector<std::string> &fields, const PrecisionCtx &ctx);

} // namespace tbp
