// SPDX-License-Identifier: Apache-2.0
#include "shearlab/tridiag_lu.hpp"

#include "shearlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace shear {

TridiagonalLU::TridiagonalLU(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper)
{
    const std::size_t n = diag.size();
    require(n >= 1, ErrorCode::InvalidGrid, "empty tridiagonal matrix");
    require(lower.size() + 1 == n && upper.size() + 1 == n, ErrorCode::LengthMismatch,
            "tridiagonal bands have inconsistent lengths");

    d_.assign(diag.begin(), diag.end());
    u1_.assign(upper.begin(), upper.end());
    u2_.assign(n > 2 ? n - 2 : 0, cplx{0.0, 0.0});
    mult_.assign(n - 1, cplx{0.0, 0.0});
    swapped_.assign(n - 1, 0);
    CVector l(lower.begin(), lower.end());

    double scale = 0.0;
    for (const auto& x : diag) scale = std::max(scale, std::abs(x));
    for (const auto& x : lower) scale = std::max(scale, std::abs(x));
    for (const auto& x : upper) scale = std::max(scale, std::abs(x));

    // Row i is eliminated against row i+1; the larger |entry| in column i
    // becomes the pivot.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d_[i]) >= std::abs(l[i])) {
            if (d_[i] == cplx{0.0, 0.0}) {
                singular_ = true;
                continue;
            }
            const cplx f = l[i] / d_[i];
            mult_[i] = f;
            d_[i + 1] -= f * u1_[i];
        } else {
            // swap rows i and i+1
            const cplx f = d_[i] / l[i];
            mult_[i] = f;
            swapped_[i] = 1;
            d_[i] = l[i];
            const cplx tmp = d_[i + 1];
            d_[i + 1] = u1_[i] - f * tmp;
            u1_[i] = tmp;
            if (i + 2 < n) {
                u2_[i] = u1_[i + 1];
                u1_[i + 1] = -f * u2_[i];
            }
        }
    }
    for (auto& x : d_) {
        if (x == cplx{0.0, 0.0} || std::abs(x) <= 1e-300 * std::max(scale, 1e-300)) {
            singular_ = true;
        } else {
            x = 1.0 / x;
        }
    }
}

void TridiagonalLU::solve(std::span<cplx> b) const
{
    const std::size_t n = d_.size();
    require(b.size() == n, ErrorCode::LengthMismatch, "right-hand side length mismatch");
    if (singular_) throw NumericalError(ErrorCode::SingularMatrix, "tridiagonal factor is singular");

    // L y = P b
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (swapped_[i]) {
            const cplx tmp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tmp - mult_[i] * b[i];
        } else {
            b[i + 1] -= mult_[i] * b[i];
        }
    }
    // U x = y
    b[n - 1] *= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - u1_[n - 2] * b[n - 1]) * d_[n - 2];
    for (std::size_t i = n > 2 ? n - 2 : 0; i-- > 0;) {
        b[i] = (b[i] - u1_[i] * b[i + 1] - u2_[i] * b[i + 2]) * d_[i];
    }
}

void TridiagonalLU::solve_adjoint(std::span<cplx> b) const
{
    const std::size_t n = d_.size();
    require(b.size() == n, ErrorCode::LengthMismatch, "right-hand side length mismatch");
    if (singular_) throw NumericalError(ErrorCode::SingularMatrix, "tridiagonal factor is singular");

    // A^* = U^* L^* P^T : solve U^* z = b, then L^* w = z, then x = P w.
    b[0] *= std::conj(d_[0]);
    if (n > 1) b[1] = (b[1] - std::conj(u1_[0]) * b[0]) * std::conj(d_[1]);
    for (std::size_t i = 2; i < n; ++i) {
        b[i] = (b[i] - std::conj(u1_[i - 1]) * b[i - 1] - std::conj(u2_[i - 2]) * b[i - 2]) * std::conj(d_[i]);
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        b[i] -= std::conj(mult_[i]) * b[i + 1];
        if (swapped_[i]) std::swap(b[i], b[i + 1]);
    }
}

} // namespace shear
