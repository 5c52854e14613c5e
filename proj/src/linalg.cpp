#include "tbp/linalg.hpp"

#include "tbp/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace tbp {

SmallMatrix::SmallMatrix(int rows, int cols) : rows_(rows), cols_(cols)
{
    if (rows < 1 || cols < 1 || rows > kMaxDim || cols > kMaxDim) {
        throw std::invalid_argument("SmallMatrix: dimensions out of range");
    }
    a_.assign(static_cast<std::size_t>(rows) * cols, BigReal(0));
}

SmallMatrix SmallMatrix::identity(int n)
{
    SmallMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1;
    }
    return m;
}

namespace {

// In-place Householder triangularization of [A | b]. Returns the number of
// reflections applied (for the determinant sign). Rank check against the
// largest original column norm.
int householder(SmallMatrix &A, Vec &b, const PrecisionCtx &ctx)
{
    const int m = A.rows();
    const int n = A.cols();
    BigReal max_colnorm = 0;
    for (int j = 0; j < n; ++j) {
        BigReal s = 0;
        for (int i = 0; i < m; ++i) {
            s += A(i, j) * A(i, j);
        }
        s = sqrt(s);
        if (s > max_colnorm) {
            max_colnorm = s;
        }
    }
    const BigReal rank_tol = pow10(-ctx.decimal_digits + 4, ctx) * max_colnorm;

    int reflections = 0;
    Vec v(static_cast<std::size_t>(m));
    for (int k = 0; k < n; ++k) {
        BigReal s = 0;
        for (int i = k; i < m; ++i) {
            s += A(i, k) * A(i, k);
        }
        BigReal alpha = sqrt(s);
        if (alpha <= rank_tol) {
            throw rank_deficient_error();
        }
        if (A(k, k) > 0) {
            alpha = -alpha;
        }
        // v = x - alpha e_k
        BigReal vnorm2 = s - 2 * alpha * A(k, k) + alpha * alpha;
        if (vnorm2 == 0) {
            // Column already triangular below the diagonal.
            continue;
        }
        for (int i = k; i < m; ++i) {
            v[i] = A(i, k);
        }
        v[k] -= alpha;
        ++reflections;
        // Apply H = I - 2 v v^T / (v^T v) to the trailing columns and to b.
        for (int j = k; j < n; ++j) {
            BigReal dot = 0;
            for (int i = k; i < m; ++i) {
                dot += v[i] * A(i, j);
            }
            BigReal f = 2 * dot / vnorm2;
            for (int i = k; i < m; ++i) {
                A(i, j) -= f * v[i];
            }
        }
        if (!b.empty()) {
            BigReal dot = 0;
            for (int i = k; i < m; ++i) {
                dot += v[i] * b[i];
            }
            BigReal f = 2 * dot / vnorm2;
            for (int i = k; i < m; ++i) {
                b[i] -= f * v[i];
            }
        }
    }
    return reflections;
}

} // namespace

LsqResult qr_least_squares(const SmallMatrix &A, const Vec &b, const PrecisionCtx &ctx)
{
    const int m = A.rows();
    const int n = A.cols();
    if (m < n) {
        throw std::invalid_argument("qr_least_squares: need m >= n");
    }
    if (static_cast<int>(b.size()) != m) {
        throw std::invalid_argument("qr_least_squares: rhs length mismatch");
    }
    ScopedPrecision sp(ctx);
    SmallMatrix R = A;
    Vec qtb = b;
    householder(R, qtb, ctx);

    LsqResult out;
    out.x.assign(static_cast<std::size_t>(n), BigReal(0));
    for (int i = n - 1; i >= 0; --i) {
        BigReal s = qtb[i];
        for (int j = i + 1; j < n; ++j) {
            s -= R(i, j) * out.x[j];
        }
        out.x[i] = s / R(i, i);
    }
    BigReal r2 = 0;
    for (int i = n; i < m; ++i) {
        r2 += qtb[i] * qtb[i];
    }
    out.residual_norm = sqrt(r2);
    return out;
}

BigReal qr_determinant(const SmallMatrix &A, const PrecisionCtx &ctx)
{
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("qr_determinant: matrix must be square");
    }
    ScopedPrecision sp(ctx);
    SmallMatrix R = A;
    Vec none;
    int reflections = 0;
    try {
        reflections = householder(R, none, ctx);
    } catch (const rank_deficient_error &) {
        return BigReal(0);
    }
    BigReal det = (reflections % 2 == 0) ? 1 : -1;
    for (int i = 0; i < A.rows(); ++i) {
        det *= R(i, i);
    }
    return det;
}

std::array<std::complex<double>, 12> eigenvalues_12(const SmallMatrix &M)
{
    if (M.rows() != 12 || M.cols() != 12) {
        throw std::invalid_argument("eigenvalues_12: matrix must be 12x12");
    }
    Eigen::MatrixXd A(12, 12);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            const double v = static_cast<double>(M(i, j));
            if (!std::isfinite(v)) {
                throw std::invalid_argument("eigenvalues_12: non-finite entry");
            }
            A(i, j) = v;
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) {
        throw eigen_no_convergence_error();
    }
    std::array<std::complex<double>, 12> out;
    for (int i = 0; i < 12; ++i) {
        out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    }
    return out;
}

} // namespace tbp
