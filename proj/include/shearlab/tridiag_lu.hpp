// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace shear {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// LU factorization with partial pivoting of a complex tridiagonal matrix
///
///     | d0 u0             |
///     | l0 d1 u1          |
///     |    l1 d2 u2       |
///     |        ...        |
///
/// Row interchanges introduce fill in the second superdiagonal, so U is
/// stored as three bands (u, u2). L is unit lower bidiagonal with
/// multipliers in `mult_`. The same layout as LAPACK's ?gttrf.
class TridiagonalLU {
public:
    TridiagonalLU() = default;
    TridiagonalLU(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper);

    std::size_t size() const { return d_.size(); }

    /// True when some pivot is exactly zero (or below `singular_tol` relative
    /// to the largest matrix entry).
    bool singular() const { return singular_; }

    /// Solve A x = b in place.
    void solve(std::span<cplx> b) const;
    /// Solve A^* x = b in place (conjugate transpose).
    void solve_adjoint(std::span<cplx> b) const;

private:
    CVector d_;      // reciprocal of the U diagonal
    CVector u1_;     // U first superdiagonal
    CVector u2_;     // U second superdiagonal (fill from pivoting)
    CVector mult_;   // L multipliers
    std::vector<unsigned char> swapped_;
    bool singular_ = false;
};

} // namespace shear
