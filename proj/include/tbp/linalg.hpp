#pragma once

#include "tbp/precision.hpp"

#include <array>
#include <complex>
#include <vector>

namespace tbp {

// Small dense matrix of BigReal entries, row-major. The pipeline only ever
// needs 12x3 and 12x12.
class SmallMatrix {
public:
    static constexpr int kMaxDim = 16;

    SmallMatrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    BigReal &operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const BigReal &operator()(int i, int j) const
    {
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }

    static SmallMatrix identity(int n);

private:
    int rows_;
    int cols_;
    std::vector<BigReal> a_;
};

using Vec = std::vector<BigReal>;

struct LsqResult {
    Vec x;
    BigReal residual_norm;
};

// Least-squares solve of an overdetermined m x n system (m >= n) by
// Householder reflections. Throws rank_deficient_error when a pivot column
// norm falls below 10^(-digits+4) of the largest column norm of A.
LsqResult qr_least_squares(const SmallMatrix &A, const Vec &b, const PrecisionCtx &ctx);

// Signed determinant of a square matrix via the same Householder QR.
BigReal qr_determinant(const SmallMatrix &A, const PrecisionCtx &ctx);

// Eigenvalues of a 12x12 matrix after downcast to double (Hessenberg + shifted
// QR). Accuracy ~1e-8 on magnitudes; enough for the coarse stability verdict.
// Throws eigen_no_convergence_error if the iteration fails.
std::array<std::complex<double>, 12> eigenvalues_12(const SmallMatrix &M);

} // namespace tbp
