// Internal engine of the Taylor integrator: the AD recurrences for the
// three-body right-hand side, generic over the scalar type so the same code
// propagates plain state (BigReal) and tangent bundles (Dual<N>).
//
// The operation graph per body pair (i, j), fixed for reproducibility:
//   dx = x_j - x_i, dy = y_j - y_i
//   s  = dx^2 + dy^2
//   w  = s^(-3/2)             (power recurrence)
//   fx = dx * w, fy = dy * w  (convolutions)
// and the series advance
//   x'  = vx, y' = vy, vx' = +/- sum fx, vy' = +/- sum fy.
//
// Inner loops go through thin mpfr wrappers to keep the hot path free of
// temporaries; workspace storage is allocated once per integration.
#pragma once

#include "tbp/errors.hpp"
#include "tbp/precision.hpp"

#include <mpfr.h>

#include <array>
#include <cstddef>
#include <vector>

namespace tbp::detail {

inline mpfr_ptr raw(BigReal &x)
{
    return x.backend().data();
}
inline mpfr_srcptr raw(const BigReal &x)
{
    return x.backend().data();
}

struct Scratch {
    BigReal t1, t2;
    explicit Scratch(int wd) : t1(0, static_cast<unsigned>(wd)), t2(0, static_cast<unsigned>(wd))
    {
    }
};

// ---- BigReal primitive ops -------------------------------------------------

inline void szero(BigReal &x)
{
    mpfr_set_zero(raw(x), 1);
}

inline void sset(BigReal &out, const BigReal &a)
{
    mpfr_set(raw(out), raw(a), MPFR_RNDN);
}

inline void ssub(BigReal &out, const BigReal &a, const BigReal &b)
{
    mpfr_sub(raw(out), raw(a), raw(b), MPFR_RNDN);
}

inline void sneg(BigReal &x)
{
    mpfr_neg(raw(x), raw(x), MPFR_RNDN);
}

// acc += a * b
inline void acc_mul(BigReal &acc, const BigReal &a, const BigReal &b, Scratch &sc)
{
    mpfr_mul(raw(sc.t1), raw(a), raw(b), MPFR_RNDN);
    mpfr_add(raw(acc), raw(acc), raw(sc.t1), MPFR_RNDN);
}

// acc -= a * b
inline void acc_submul(BigReal &acc, const BigReal &a, const BigReal &b, Scratch &sc)
{
    mpfr_mul(raw(sc.t1), raw(a), raw(b), MPFR_RNDN);
    mpfr_sub(raw(acc), raw(acc), raw(sc.t1), MPFR_RNDN);
}

// acc += c * a * b  (long coefficient)
inline void acc_mul_si(BigReal &acc, long c, const BigReal &a, const BigReal &b, Scratch &sc)
{
    mpfr_mul(raw(sc.t1), raw(a), raw(b), MPFR_RNDN);
    mpfr_mul_si(raw(sc.t1), raw(sc.t1), c, MPFR_RNDN);
    mpfr_add(raw(acc), raw(acc), raw(sc.t1), MPFR_RNDN);
}

inline void acc_add(BigReal &acc, const BigReal &a)
{
    mpfr_add(raw(acc), raw(acc), raw(a), MPFR_RNDN);
}

inline void acc_sub(BigReal &acc, const BigReal &a)
{
    mpfr_sub(raw(acc), raw(acc), raw(a), MPFR_RNDN);
}

// out = a / k
inline void div_si(BigReal &out, const BigReal &a, long k)
{
    mpfr_div_si(raw(out), raw(a), k, MPFR_RNDN);
}

// out = num / den
inline void sdiv(BigReal &out, const BigReal &num, const BigReal &den, Scratch &)
{
    mpfr_div(raw(out), raw(num), raw(den), MPFR_RNDN);
}

// out = a^(-3/2)
inline void pow_m32(BigReal &out, const BigReal &a, Scratch &sc)
{
    mpfr_sqrt(raw(sc.t1), raw(a), MPFR_RNDN);
    mpfr_mul(raw(sc.t2), raw(sc.t1), raw(a), MPFR_RNDN);
    mpfr_si_div(raw(out), 1, raw(sc.t2), MPFR_RNDN);
}

// x = x * h + c  (Horner update, h is always a base scalar)
inline void horner_step(BigReal &x, const BigReal &h, const BigReal &c, Scratch &)
{
    mpfr_mul(raw(x), raw(x), raw(h), MPFR_RNDN);
    mpfr_add(raw(x), raw(x), raw(c), MPFR_RNDN);
}

inline const BigReal &base(const BigReal &x)
{
    return x;
}

inline BigReal &base_mut(BigReal &x)
{
    return x;
}

inline void init_scalar(BigReal &x, int wd)
{
    x = BigReal(0, static_cast<unsigned>(wd));
}

// ---- Dual scalar: value plus N tangent components --------------------------

template <int N>
struct Dual {
    BigReal v;
    std::array<BigReal, N> d;
};

template <int N>
inline void init_scalar(Dual<N> &x, int wd)
{
    init_scalar(x.v, wd);
    for (auto &t : x.d) {
        init_scalar(t, wd);
    }
}

template <int N>
inline const BigReal &base(const Dual<N> &x)
{
    return x.v;
}

template <int N>
inline BigReal &base_mut(Dual<N> &x)
{
    return x.v;
}

template <int N>
inline void szero(Dual<N> &x)
{
    szero(x.v);
    for (auto &t : x.d) {
        szero(t);
    }
}

template <int N>
inline void sset(Dual<N> &out, const Dual<N> &a)
{
    sset(out.v, a.v);
    for (int i = 0; i < N; ++i) {
        sset(out.d[i], a.d[i]);
    }
}

template <int N>
inline void ssub(Dual<N> &out, const Dual<N> &a, const Dual<N> &b)
{
    ssub(out.v, a.v, b.v);
    for (int i = 0; i < N; ++i) {
        ssub(out.d[i], a.d[i], b.d[i]);
    }
}

template <int N>
inline void acc_mul(Dual<N> &acc, const Dual<N> &a, const Dual<N> &b, Scratch &sc)
{
    acc_mul(acc.v, a.v, b.v, sc);
    for (int i = 0; i < N; ++i) {
        acc_mul(acc.d[i], a.v, b.d[i], sc);
        acc_mul(acc.d[i], a.d[i], b.v, sc);
    }
}

template <int N>
inline void acc_mul_si(Dual<N> &acc, long c, const Dual<N> &a, const Dual<N> &b, Scratch &sc)
{
    acc_mul_si(acc.v, c, a.v, b.v, sc);
    for (int i = 0; i < N; ++i) {
        acc_mul_si(acc.d[i], c, a.v, b.d[i], sc);
        acc_mul_si(acc.d[i], c, a.d[i], b.v, sc);
    }
}

template <int N>
inline void acc_add(Dual<N> &acc, const Dual<N> &a)
{
    acc_add(acc.v, a.v);
    for (int i = 0; i < N; ++i) {
        acc_add(acc.d[i], a.d[i]);
    }
}

template <int N>
inline void acc_sub(Dual<N> &acc, const Dual<N> &a)
{
    acc_sub(acc.v, a.v);
    for (int i = 0; i < N; ++i) {
        acc_sub(acc.d[i], a.d[i]);
    }
}

template <int N>
inline void div_si(Dual<N> &out, const Dual<N> &a, long k)
{
    div_si(out.v, a.v, k);
    for (int i = 0; i < N; ++i) {
        div_si(out.d[i], a.d[i], k);
    }
}

// out = num / den; out must not alias num or den.
template <int N>
inline void sdiv(Dual<N> &out, const Dual<N> &num, const Dual<N> &den, Scratch &sc)
{
    sdiv(out.v, num.v, den.v, sc);
    for (int i = 0; i < N; ++i) {
        mpfr_mul(raw(sc.t1), raw(out.v), raw(den.d[i]), MPFR_RNDN);
        mpfr_sub(raw(sc.t1), raw(num.d[i]), raw(sc.t1), MPFR_RNDN);
        mpfr_div(raw(out.d[i]), raw(sc.t1), raw(den.v), MPFR_RNDN);
    }
}

// out = a^(-3/2); tangent factor is -(3/2) * out.v / a.v. No aliasing.
template <int N>
inline void pow_m32(Dual<N> &out, const Dual<N> &a, Scratch &sc)
{
    pow_m32(out.v, a.v, sc);
    mpfr_div(raw(sc.t2), raw(out.v), raw(a.v), MPFR_RNDN);
    mpfr_mul_si(raw(sc.t2), raw(sc.t2), -3, MPFR_RNDN);
    mpfr_div_si(raw(sc.t2), raw(sc.t2), 2, MPFR_RNDN);
    for (int i = 0; i < N; ++i) {
        mpfr_mul(raw(out.d[i]), raw(sc.t2), raw(a.d[i]), MPFR_RNDN);
    }
}

template <int N>
inline void horner_step(Dual<N> &x, const BigReal &h, const Dual<N> &c, Scratch &sc)
{
    horner_step(x.v, h, c.v, sc);
    for (int i = 0; i < N; ++i) {
        horner_step(x.d[i], h, c.d[i], sc);
    }
}

// ---- Jet core --------------------------------------------------------------

constexpr int kPairBody[3][2] = {{0, 1}, {0, 2}, {1, 2}};

template <class S>
class JetCore {
public:
    JetCore(int order, const PrecisionCtx &ctx)
        : p_(order), wd_(ctx.working_digits()), sc_(wd_), cutoff2_(pow10(-ctx.decimal_digits, ctx))
    {
        auto sized = [&](std::vector<S> &v, int len) {
            v.resize(static_cast<std::size_t>(len));
            for (auto &e : v) {
                init_scalar(e, wd_);
            }
        };
        for (auto &series : u_) {
            sized(series, p_ + 1);
        }
        for (int q = 0; q < 3; ++q) {
            sized(dx_[q], p_);
            sized(dy_[q], p_);
            sized(s2_[q], p_);
            sized(w_[q], p_);
            sized(fx_[q], p_);
            sized(fy_[q], p_);
        }
        init_scalar(acc_, wd_);
        init_scalar(h_, wd_);
    }

    int order() const { return p_; }

    S &state(int c) { return u_[c][0]; }
    const std::vector<S> &series(int c) const { return u_[c]; }

    // Fill coefficients 1..p from the order-0 state. Throws collision_error
    // (with time 0; the driver rethrows with the real time) when a pairwise
    // squared distance is below the cutoff.
    void compute_jet()
    {
        for (int k = 0; k < p_; ++k) {
            for (int q = 0; q < 3; ++q) {
                const int bi = kPairBody[q][0];
                const int bj = kPairBody[q][1];
                ssub(dx_[q][k], u_[4 * bj][k], u_[4 * bi][k]);
                ssub(dy_[q][k], u_[4 * bj + 1][k], u_[4 * bi + 1][k]);

                // s[k] = sum_m dx[m] dx[k-m] + dy[m] dy[k-m], symmetric halves
                szero(acc_);
                for (int m = 0; 2 * m < k; ++m) {
                    acc_mul_si(acc_, 2, dx_[q][m], dx_[q][k - m], sc_);
                    acc_mul_si(acc_, 2, dy_[q][m], dy_[q][k - m], sc_);
                }
                if (k % 2 == 0) {
                    acc_mul(acc_, dx_[q][k / 2], dx_[q][k / 2], sc_);
                    acc_mul(acc_, dy_[q][k / 2], dy_[q][k / 2], sc_);
                }
                sset(s2_[q][k], acc_);

                if (k == 0) {
                    if (base(s2_[q][0]) < cutoff2_) {
                        throw collision_error(0);
                    }
                    pow_m32(w_[q][0], s2_[q][0], sc_);
                } else {
                    // w = s^(-3/2):
                    // w[k] = -(1/(2k)) (sum_{j<k} (3k-j) w[j] s[k-j]) / s[0]
                    szero(acc_);
                    for (int j = 0; j < k; ++j) {
                        acc_mul_si(acc_, 3L * k - j, w_[q][j], s2_[q][k - j], sc_);
                    }
                    sdiv(w_[q][k], acc_, s2_[q][0], sc_);
                    div_si(w_[q][k], w_[q][k], -2L * k);
                }

                szero(acc_);
                for (int m = 0; m <= k; ++m) {
                    acc_mul(acc_, dx_[q][m], w_[q][k - m], sc_);
                }
                sset(fx_[q][k], acc_);
                szero(acc_);
                for (int m = 0; m <= k; ++m) {
                    acc_mul(acc_, dy_[q][m], w_[q][k - m], sc_);
                }
                sset(fy_[q][k], acc_);
            }

            for (int b = 0; b < 3; ++b) {
                div_si(u_[4 * b][k + 1], u_[4 * b + 2][k], k + 1);
                div_si(u_[4 * b + 1][k + 1], u_[4 * b + 3][k], k + 1);
            }
            // body 0: +pair0 +pair1; body 1: -pair0 +pair2; body 2: -pair1 -pair2
            accel(0, k, fx_, 4 * 0 + 2);
            accel(0, k, fy_, 4 * 0 + 3);
            accel(1, k, fx_, 4 * 1 + 2);
            accel(1, k, fy_, 4 * 1 + 3);
            accel(2, k, fx_, 4 * 2 + 2);
            accel(2, k, fy_, 4 * 2 + 3);
        }
    }

    // Sup norm of the base values of the order-k coefficients.
    BigReal coeff_norm(int k) const
    {
        BigReal n(0, static_cast<unsigned>(wd_));
        for (int c = 0; c < 12; ++c) {
            BigReal a = abs(base(u_[c][static_cast<std::size_t>(k)]));
            if (a > n) {
                n = a;
            }
        }
        return n;
    }

    // Horner-evaluate every series at h into its order-0 slot.
    void advance(const BigReal &h)
    {
        sset(h_, h);
        for (int c = 0; c < 12; ++c) {
            auto &s = u_[c];
            sset(acc_, s[static_cast<std::size_t>(p_)]);
            for (int k = p_ - 1; k >= 0; --k) {
                horner_step(acc_, h_, s[static_cast<std::size_t>(k)], sc_);
            }
            sset(s[0], acc_);
        }
    }

private:
    void accel(int b, int k, const std::array<std::vector<S>, 3> &f, int target)
    {
        szero(acc_);
        if (b == 0) {
            acc_add(acc_, f[0][static_cast<std::size_t>(k)]);
            acc_add(acc_, f[1][static_cast<std::size_t>(k)]);
        } else if (b == 1) {
            acc_sub(acc_, f[0][static_cast<std::size_t>(k)]);
            acc_add(acc_, f[2][static_cast<std::size_t>(k)]);
        } else {
            acc_sub(acc_, f[1][static_cast<std::size_t>(k)]);
            acc_sub(acc_, f[2][static_cast<std::size_t>(k)]);
        }
        div_si(u_[target][static_cast<std::size_t>(k + 1)], acc_, k + 1);
    }

    int p_;
    int wd_;
    Scratch sc_;
    BigReal cutoff2_;
    std::array<std::vector<S>, 12> u_;
    std::array<std::vector<S>, 3> dx_, dy_, s2_, w_, fx_, fy_;
    S acc_;
    BigReal h_;
};

} // namespace tbp::detail
