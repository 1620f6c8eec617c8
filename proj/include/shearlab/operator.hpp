// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/levelset.hpp"
#include "shearlab/profiles.hpp"
#include "shearlab/tridiag_lu.hpp"

#include <optional>
#include <string>

namespace shear {

/// Cell-centred uniform grid: n cells of width h on [lo, hi], nodes at the
/// midpoints y_i = lo + (i + 1/2) h. The walls sit half a cell outside the
/// first and last node, which makes the ghost-point Neumann closure second
/// order accurate.
struct Grid1D {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 3;

    double h() const { return (hi - lo) / static_cast<double>(n); }
    double node(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * h(); }
    std::vector<double> nodes() const;
    Interval window() const { return {lo, hi}; }
    /// Every cell split in two.
    Grid1D refined() const { return {lo, hi, 2 * n}; }
};

struct TruncationPolicy {
    double margin_factor = 8.0;        // unbounded sides cut at margin_factor * max(1, layer width)
    double n_per_layer = 10.0;         // grid points per (nu/|k|)^{1/(m+2)}
    std::size_t n_min = 201;
    std::size_t n_cap = 200000;
    std::optional<double> right_cut;   // explicit truncation point for unbounded right side
    std::optional<double> left_cut;    // explicit truncation point for unbounded left side
};

struct Truncation {
    Grid1D grid;
    double layer_width = 0.0;
    double cut = 0.0;                  // the half-width Y used on unbounded sides (0 if bounded)
    bool capped = false;               // n hit n_cap
};

/// Boundary-layer width (nu/|k|)^{1/(m+2)} that sets the enhanced-dissipation scale.
double layer_width(double nu, double k, int m);

Truncation truncate_domain(const ShearProfile& p, double nu, double k, const TruncationPolicy& policy = {});

/// Same policy with unbounded sides cut at twice the distance (and the same h).
Truncation doubled_truncation(const ShearProfile& p, double nu, double k, const TruncationPolicy& policy = {});

enum class Closure { Neumann, Dirichlet };

/// Discretization of H = -nu d^2/dy^2 + i k (v(y) - lambda) by central
/// differences with a symmetric ghost-point closure. In the inner product
/// <f, g>_h = h sum f_i conj(g_i), the diffusion part equals nu D^T D with D
/// the forward difference, so Re<Hg, g>_h = nu ||D g||_h^2 exactly.
class TridiagonalOperator {
public:
    TridiagonalOperator(const Grid1D& grid, std::vector<double> v_nodes, double nu, double k, double lambda,
                        Closure closure = Closure::Neumann);

    std::size_t n() const { return diag_.size(); }
    const Grid1D& grid() const { return grid_; }
    double nu() const { return nu_; }
    double k() const { return k_; }
    double lambda() const { return lambda_; }
    Closure closure() const { return closure_; }
    const CVector& diag() const { return diag_; }
    const std::vector<double>& off() const { return off_; }
    const std::vector<double>& v_nodes() const { return v_; }

    /// Same operator with the imaginary shift moved to a new level.
    TridiagonalOperator with_lambda(double lambda) const;
    /// s * H (used by the scale test).
    TridiagonalOperator scaled(double s) const;

    void apply(std::span<const cplx> g, std::span<cplx> out) const;
    CVector apply(std::span<const cplx> g) const;
    void apply_adjoint(std::span<const cplx> g, std::span<cplx> out) const;

    /// Factorization of alpha I + beta H.
    TridiagonalLU factor_shifted(cplx alpha, cplx beta) const;
    TridiagonalLU factor() const { return factor_shifted(0.0, 1.0); }

    std::string to_json() const;

private:
    Grid1D grid_;
    std::vector<double> v_;
    double nu_;
    double k_;
    double lambda_;
    Closure closure_;
    CVector diag_;
    std::vector<double> off_;
};

TridiagonalOperator assemble(const ShearProfile& p, const Grid1D& grid, double nu, double k, double lambda,
                             Closure closure = Closure::Neumann);

// Discrete inner products and norms in the h-weighted l2 space.
cplx inner(std::span<const cplx> f, std::span<const cplx> g, double h);
double norm(std::span<const cplx> g, double h);
/// ||D g||_h with D the forward difference over the n-1 cells.
double grad_norm(std::span<const cplx> g, double h);
double sup_norm(std::span<const cplx> g);

struct NumericalRangeResidual {
    double re_residual = 0.0;
    double im_residual = 0.0;
};

/// Residuals of Re<Hg,g> = nu ||Dg||^2 and Im<Hg,g> = k sum (v - lambda)|g|^2 h,
/// both relative to ||g||^2.
NumericalRangeResidual numerical_range_check(const TridiagonalOperator& op, std::span<const cplx> g);

/// ||g||_inf^2 / (2 ||g|| ||Dg||): the one-dimensional interpolation
/// inequality for functions vanishing at an end of the line reads ratio <= 1.
double interpolation_ratio(std::span<const cplx> g, double h);

/// interpolation_ratio after checking that g has decayed at both ends of the
/// grid (|g| < edge_tol max|g| there); EdgeNotDecayed otherwise.
double interpolation_inequality_check(std::span<const cplx> g, const Grid1D& grid, double edge_tol = 1e-6);

} // namespace shear
