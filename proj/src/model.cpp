#include "tbp/model.hpp"

#include "tbp/errors.hpp"

namespace tbp {

namespace {

constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

// Squared collision cutoff: (10^(-digits/2))^2 = 10^(-digits).
BigReal collision_cutoff2(const PrecisionCtx &ctx)
{
    return pow10(-ctx.decimal_digits, ctx);
}

} // namespace

State12 initial_state(const SearchPoint &p, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    State12 u;
    BigReal vx = p.vx;
    BigReal vy = p.vy;
    u.x(0) = -1;
    u.y(0) = 0;
    u.x(1) = 1;
    u.y(1) = 0;
    u.x(2) = 0;
    u.y(2) = 0;
    u.vx(0) = vx;
    u.vy(0) = vy;
    u.vx(1) = vx;
    u.vy(1) = vy;
    u.vx(2) = -2 * vx;
    u.vy(2) = -2 * vy;
    return u;
}

State12 derivative(const State12 &u, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    const BigReal cutoff2 = collision_cutoff2(ctx);
    State12 du;
    for (int b = 0; b < 3; ++b) {
        du.x(b) = u.vx(b);
        du.y(b) = u.vy(b);
        du.vx(b) = 0;
        du.vy(b) = 0;
    }
    for (const auto &pr : kPairs) {
        const int i = pr[0];
        const int j = pr[1];
        BigReal dx = u.x(j) - u.x(i);
        BigReal dy = u.y(j) - u.y(i);
        BigReal s2 = dx * dx + dy * dy;
        if (s2 < cutoff2) {
            throw collision_error(0);
        }
        BigReal w = 1 / (s2 * sqrt(s2)); // |r_i - r_j|^-3
        du.vx(i) += dx * w;
        du.vy(i) += dy * w;
        du.vx(j) -= dx * w;
        du.vy(j) -= dy * w;
    }
    return du;
}

BigReal energy(const SearchPoint &p, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    BigReal e = 3 * (p.vx * p.vx + p.vy * p.vy);
    e -= BigReal(5) / 2;
    return e;
}

Conserved conserved_quantities(const State12 &u, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    const BigReal cutoff2 = collision_cutoff2(ctx);
    Conserved out;
    out.energy = 0;
    out.angular_momentum = 0;
    out.px = 0;
    out.py = 0;
    for (int b = 0; b < 3; ++b) {
        out.energy += (u.vx(b) * u.vx(b) + u.vy(b) * u.vy(b)) / 2;
        out.angular_momentum += u.x(b) * u.vy(b) - u.y(b) * u.vx(b);
        out.px += u.vx(b);
        out.py += u.vy(b);
    }
    for (const auto &pr : kPairs) {
        BigReal dx = u.x(pr[1]) - u.x(pr[0]);
        BigReal dy = u.y(pr[1]) - u.y(pr[0]);
        BigReal s2 = dx * dx + dy * dy;
        if (s2 < cutoff2) {
            throw collision_error(0);
        }
        out.energy -= 1 / sqrt(s2);
    }
    return out;
}

BigReal proximity(const State12 &u, const State12 &u0)
{
    BigReal s = 0;
    for (int k = 0; k < 12; ++k) {
        BigReal d = u.c[k] - u0.c[k];
        s += d * d;
    }
    return sqrt(s);
}

std::vector<std::string> serialize_state(const State12 &u, int digits)
{
    std::vector<std::string> out;
    out.reserve(12);
    for (const auto &v : u.c) {
        out.push_back(format_decimal(v, digits));
    }
    return out;
}

State12 deserialize_state(const std::vector<std::string> &fields, const PrecisionCtx &ctx)
{
    if (fields.size() != 12) {
        throw std::invalid_argument("deserialize_state: expected 12 fields");
    }
    State12 u;
    for (int k = 0; k < 12; ++k) {
        u.c[k] = make_real(fields[k], ctx);
    }
    return u;
}

} // namespace tbp
