#include "tbp/classifier.hpp"

#include "tbp/errors.hpp"
#include "tbp/taylor.hpp"

#include <algorithm>
#include <stdexcept>

namespace tbp {

namespace {

bool inverse_pair(char a, char b)
{
    return (a == 'a' && b == 'A') || (a == 'A' && b == 'a') || (b == 'B' && a == 'b')
           || (a == 'B' && b == 'b');
}

int letter_rank(char c)
{
    switch (c) {
    case 'a':
        return 0;
    case 'A':
        return 1;
    case 'b':
        return 2;
    case 'B':
        return 3;
    }
    throw std::invalid_argument("letter_rank: invalid generator letter");
}

// Oriented area of the triangle (doubled): positive when body 3 lies to the
// left of the 1->2 direction.
BigReal area(const State12 &u)
{
    return (u.x(1) - u.x(0)) * (u.y(2) - u.y(0)) - (u.x(2) - u.x(0)) * (u.y(1) - u.y(0));
}

BigReal area_dot(const State12 &u)
{
    return (u.vx(1) - u.vx(0)) * (u.y(2) - u.y(0)) + (u.x(1) - u.x(0)) * (u.vy(2) - u.vy(0))
           - (u.vx(2) - u.vx(0)) * (u.y(1) - u.y(0)) - (u.x(2) - u.x(0)) * (u.vy(1) - u.vy(0));
}

// 1-based index of the body strictly between the other two on the line.
int middle_body(const State12 &u)
{
    int best = 1;
    BigReal best_dot;
    bool have = false;
    for (int m = 0; m < 3; ++m) {
        const int a = (m + 1) % 3;
        const int b = (m + 2) % 3;
        BigReal dot = (u.x(a) - u.x(m)) * (u.x(b) - u.x(m)) + (u.y(a) - u.y(m)) * (u.y(b) - u.y(m));
        if (!have || dot < best_dot) {
            have = true;
            best_dot = dot;
            best = m + 1;
        }
    }
    return best;
}

// Letter table calibrated on the figure-eight anchor (its word must read
// abAB): loops around the body-1 and body-2 punctures are the generators,
// the body-3 loop is eliminated via the relation (product of the three
// positive loops = identity).
const char *syzygy_letter(int middle, int sign)
{
    static const char *kTable[3][2] = {
        // negative. positive
        {"A", "a"},   // middle body 1
        {"B", "b"},   // middle body 2
        {"BA", "ab"}, // middle body 3
    };
    if (middle < 1 || middle > 3 || sign == 0) {
        throw std::invalid_argument("syzygy_letter: bad syzygy");
    }
    return kTable[middle - 1][sign > 0 ? 1 : 0];
}

} // namespace

std::string free_reduce(const std::string &w)
{
    std::string out;
    out.reserve(w.size());
    for (char c : w) {
        if (!out.empty() && inverse_pair(out.back(), c)) {
            out.pop_back();
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string cyclic_reduce(const std::string &w)
{
    std::string r = free_reduce(w);
    while (r.size() >= 2 && inverse_pair(r.front(), r.back())) {
        r = r.substr(1, r.size() - 2);
    }
    return r;
}

FreeWord canonical_word(const std::string &raw)
{
    std::string r = cyclic_reduce(raw);
    if (r.size() <= 1) {
        return FreeWord(r);
    }
    auto less_rot = [&](std::size_t i, std::size_t j) {
        const std::size_t n = r.size();
        for (std::size_t k = 0; k < n; ++k) {
            int ri = letter_rank(r[(i + k) % n]);
            int rj = letter_rank(r[(j + k) % n]);
            if (ri != rj) {
                return ri < rj;
            }
        }
        return false;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (less_rot(i, best)) {
            best = i;
        }
    }
    return FreeWord(r.substr(best) + r.substr(0, best));
}

std::vector<Syzygy> syzygy_sequence(const SearchPoint &p, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    const BigReal T = p.T;
    const State12 u0 = initial_state(p, ctx);
    const BigReal dot0 = area_dot(u0);
    const BigReal degenerate_tol = BigReal("1e-30");
    if (abs(dot0) < degenerate_tol) {
        throw degenerate_syzygy_error(0);
    }

    // Roots right at the period boundary belong to the boundary syzygy; the
    // initial configuration is itself collinear.
    const BigReal edge = BigReal("1e-6");
    constexpr int nsub = 16;
    const BigReal bisect_tol = BigReal("1e-20");

    std::vector<Syzygy> seq;
    auto on_step = [&](const StepRecord &rec) {
        std::array<BigReal, nsub + 1> tau, val;
        for (int m = 0; m <= nsub; ++m) {
            tau[m] = rec.h * m / nsub;
            val[m] = area(dense_eval(rec, tau[m]));
        }
        for (int m = 0; m < nsub; ++m) {
            BigReal ta = rec.t_start + tau[m];
            BigReal tb = rec.t_start + tau[m + 1];
            if (tb < edge || ta > T - edge) {
                continue;
            }
            if (!(val[m] < 0) == !(val[m + 1] < 0)) {
                continue; // no sign change
            }
            BigReal a = tau[m], b = tau[m + 1];
            BigReal fa = val[m];
            while (b - a > bisect_tol) {
                BigReal mid = (a + b) / 2;
                BigReal fm = area(dense_eval(rec, mid));
                if (!(fa < 0) == !(fm < 0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            BigReal root_tau = (a + b) / 2;
            BigReal root_t = rec.t_start + root_tau;
            if (root_t < edge || root_t > T - edge) {
                continue;
            }
            State12 ur = dense_eval(rec, root_tau);
            BigReal dot = area_dot(ur);
            if (abs(dot) < degenerate_tol) {
                throw degenerate_syzygy_error(static_cast<double>(rec.t_start + root_tau));
            }
            Syzygy s;
            s.t = rec.t_start + root_tau;
            s.middle = middle_body(ur);
            s.sign = dot > 0 ? 1 : -1;
            seq.push_back(s);
        }
    };
    integrate(u0, T, ctx, on_step);

    Syzygy boundary;
    boundary.t = T;
    boundary.middle = middle_body(u0);
    boundary.sign = dot0 > 0 ? 1 : -1;
    seq.push_back(boundary);
    return seq;
}

FreeWord word_from_syzygies(const std::vector<Syzygy> &seq)
{
    std::string raw;
    for (const auto &s : seq) {
        raw += syzygy_letter(s.middle, s.sign);
    }
    return canonical_word(raw);
}

int satellite_power(const FreeWord &w)
{
    const std::string &c = w.letters;
    if (c.empty() || c.size() % 4 != 0) {
        return 0;
    }
    const std::size_t k = c.size() / 4;
    std::string target;
    target.reserve(c.size());
    for (std::size_t i = 0; i < k; ++i) {
        target += "abAB";
    }
    return canonical_word(target).letters == c ? static_cast<int>(k) : 0;
}

BigReal scale_invariant_period(const BigReal &vx, const BigReal &vy, const BigReal &T,
                               const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    BigReal e = 3 * (vx * vx + vy * vy);
    e -= BigReal(5) / 2;
    BigReal mag = abs(e);
    if (mag < BigReal("1e-10")) {
        throw zero_energy_error();
    }
    return T * mag * sqrt(mag);
}

bool is_choreography(const SearchPoint &p, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    const int kSamples = 64;
    const BigReal T = p.T;
    const BigReal shift = T / 3;
    const BigReal tol = pow10(-ctx.decimal_digits / 2, ctx);

    // Probe times: the samples and their T/3-shifted counterparts (mod T).
    struct Probe {
        BigReal t;
        int slot; // 0 = plain sample s, 1 = shifted sample s
        int s;
    };
    std::vector<Probe> probes;
    probes.reserve(2 * kSamples);
    for (int s = 0; s < kSamples; ++s) {
        BigReal t = T * s / kSamples;
        BigReal ts = t + shift;
        if (ts >= T) {
            ts -= T;
        }
        probes.push_back({t, 0, s});
        probes.push_back({ts, 1, s});
    }
    std::sort(probes.begin(), probes.end(), [](const Probe &a, const Probe &b) { return a.t < b.t; });

    std::vector<State12> plain(kSamples), shifted(kSamples);
    const State12 u0 = initial_state(p, ctx);
    std::size_t idx = 0;
    while (idx < probes.size() && probes[idx].t == 0) {
        (probes[idx].slot == 0 ? plain : shifted)[probes[idx].s] = u0;
        ++idx;
    }
    integrate(u0, T, ctx, [&](const StepRecord &rec) {
        const BigReal t_end = rec.t_start + rec.h;
        while (idx < probes.size() && probes[idx].t <= t_end) {
            State12 u = dense_eval(rec, probes[idx].t - rec.t_start);
            (probes[idx].slot == 0 ? plain : shifted)[probes[idx].s] = u;
            ++idx;
        }
    });
    if (idx != probes.size()) {
        throw std::logic_error("is_choreography: probe coverage incomplete");
    }

    // sigma maps body i at time t to the body it becomes at t + T/3.
    // Identity is excluded (it would imply period T/3).
    const int perms[2][3] = {{1, 2, 0}, {2, 0, 1}};
    for (const auto &perm : perms) {
        bool ok = true;
        for (int s = 0; s < kSamples && ok; ++s) {
            for (int i = 0; i < 3 && ok; ++i) {
                const int si = perm[i];
                BigReal dx = shifted[s].x(i) - plain[s].x(si);
                BigReal dy = shifted[s].y(i) - plain[s].y(si);
                BigReal dvx = shifted[s].vx(i) - plain[s].vx(si);
                BigReal dvy = shifted[s].vy(i) - plain[s].vy(si);
                if (sqrt(dx * dx + dy * dy) >= tol || sqrt(dvx * dvx + dvy * dvy) >= tol) {
                    ok = false;
                }
            }
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

} // namespace tbp
