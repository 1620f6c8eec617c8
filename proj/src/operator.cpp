// SPDX-License-Identifier: Apache-2.0
#include "shearlab/operator.hpp"

#include "shearlab/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace shear {

std::vector<double> Grid1D::nodes() const
{
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = node(i);
    return y;
}

double layer_width(double nu, double k, int m)
{
    require(nu > 0.0 && k != 0.0 && m >= 1, ErrorCode::InvalidArgument, "layer width needs nu>0, k!=0, m>=1");
    return std::pow(nu / std::abs(k), 1.0 / (m + 2));
}

namespace {

Truncation build(const ShearProfile& p, double nu, double k, const TruncationPolicy& pol, double stretch)
{
    require(pol.margin_factor > 0.0 && pol.n_per_layer > 0.0 && pol.n_min >= 3 && pol.n_cap >= pol.n_min,
            ErrorCode::InvalidArgument, "truncation policy must be positive");
    Truncation t;
    // k == 0 only occurs on heat-equation test paths; fall back to the unit scale.
    t.layer_width = (k == 0.0) ? 1.0 : layer_width(nu, k, p.m());
    const double Y = pol.margin_factor * std::max(1.0, t.layer_width);
    const auto& d = p.domain();

    double lo = d.a;
    double hi = d.b;
    switch (d.kind) {
    case DomainKind::Interval: break;
    case DomainKind::FullLine:
        lo = stretch * pol.left_cut.value_or(-Y);
        hi = stretch * pol.right_cut.value_or(Y);
        break;
    case DomainKind::HalfLineRight:
        hi = d.a + stretch * (pol.right_cut ? *pol.right_cut - d.a : Y);
        break;
    case DomainKind::HalfLineLeft:
        lo = d.b - stretch * (pol.left_cut ? d.b - *pol.left_cut : Y);
        break;
    }
    require(lo < hi, ErrorCode::InvalidGrid, "truncation produced an empty window");
    t.cut = d.bounded() ? 0.0 : std::max(std::abs(lo), std::abs(hi));

    // Resolution is fixed at stretch 1 so that doubling keeps h.
    const double base_length = (hi - lo) / (d.bounded() ? 1.0 : stretch);
    const double h_target = std::min(t.layer_width / pol.n_per_layer,
                                     base_length / static_cast<double>(pol.n_min));
    std::size_t base_cells = static_cast<std::size_t>(std::ceil(base_length / h_target - 1e-9));
    base_cells = std::max(base_cells, pol.n_min);
    if (base_cells > pol.n_cap) {
        base_cells = pol.n_cap;
        t.capped = true;
    }
    const std::size_t cells = d.bounded() ? base_cells
                                          : static_cast<std::size_t>(std::llround(stretch)) * base_cells;
    t.grid = Grid1D{lo, hi, cells};
    return t;
}

} // namespace

Truncation truncate_domain(const ShearProfile& p, double nu, double k, const TruncationPolicy& policy)
{
    return build(p, nu, k, policy, 1.0);
}

Truncation doubled_truncation(const ShearProfile& p, double nu, double k, const TruncationPolicy& policy)
{
    return build(p, nu, k, policy, 2.0);
}

TridiagonalOperator::TridiagonalOperator(const Grid1D& grid, std::vector<double> v_nodes, double nu, double k,
                                         double lambda, Closure closure)
    : grid_(grid), v_(std::move(v_nodes)), nu_(nu), k_(k), lambda_(lambda), closure_(closure)
{
    require(grid.n >= 3 && grid.hi > grid.lo, ErrorCode::InvalidGrid, "grid needs n >= 3 and lo < hi");
    require(v_.size() == grid.n, ErrorCode::LengthMismatch, "profile samples do not match the grid");
    require(nu > 0.0, ErrorCode::InvalidArgument, "nu must be positive");

    const std::size_t n = grid.n;
    const double h = grid.h();
    const double c = nu / (h * h);
    diag_.resize(n);
    off_.assign(n - 1, -c);
    for (std::size_t i = 0; i < n; ++i) {
        double re = 2.0 * c;
        if (closure == Closure::Neumann && (i == 0 || i + 1 == n)) re = c;
        diag_[i] = cplx{re, k * (v_[i] - lambda)};
    }
}

TridiagonalOperator TridiagonalOperator::with_lambda(double lambda) const
{
    TridiagonalOperator out = *this;
    out.lambda_ = lambda;
    for (std::size_t i = 0; i < diag_.size(); ++i) {
        out.diag_[i] = cplx{diag_[i].real(), k_ * (v_[i] - lambda)};
    }
    return out;
}

TridiagonalOperator TridiagonalOperator::scaled(double s) const
{
    require(s > 0.0, ErrorCode::InvalidArgument, "scale must be positive");
    TridiagonalOperator out = *this;
    out.nu_ *= s;
    out.k_ *= s;
    for (auto& d : out.diag_) d *= s;
    for (auto& o : out.off_) o *= s;
    return out;
}

void TridiagonalOperator::apply(std::span<const cplx> g, std::span<cplx> out) const
{
    const std::size_t n = diag_.size();
    require(g.size() == n && out.size() == n, ErrorCode::LengthMismatch, "vector length does not match operator");
    out[0] = diag_[0] * g[0] + off_[0] * g[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = off_[i - 1] * g[i - 1] + diag_[i] * g[i] + off_[i] * g[i + 1];
    }
    out[n - 1] = off_[n - 2] * g[n - 2] + diag_[n - 1] * g[n - 1];
}

CVector TridiagonalOperator::apply(std::span<const cplx> g) const
{
    CVector out(g.size());
    apply(g, out);
    return out;
}

void TridiagonalOperator::apply_adjoint(std::span<const cplx> g, std::span<cplx> out) const
{
    const std::size_t n = diag_.size();
    require(g.size() == n && out.size() == n, ErrorCode::LengthMismatch, "vector length does not match operator");
    out[0] = std::conj(diag_[0]) * g[0] + off_[0] * g[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = off_[i - 1] * g[i - 1] + std::conj(diag_[i]) * g[i] + off_[i] * g[i + 1];
    }
    out[n - 1] = off_[n - 2] * g[n - 2] + std::conj(diag_[n - 1]) * g[n - 1];
}

TridiagonalLU TridiagonalOperator::factor_shifted(cplx alpha, cplx beta) const
{
    const std::size_t n = diag_.size();
    CVector lower(n - 1), diag(n), upper(n - 1);
    for (std::size_t i = 0; i < n; ++i) diag[i] = alpha + beta * diag_[i];
    for (std::size_t i = 0; i + 1 < n; ++i) lower[i] = upper[i] = beta * off_[i];
    return TridiagonalLU(lower, diag, upper);
}

std::string TridiagonalOperator::to_json() const
{
    nlohmann::json j;
    j["grid"] = {{"lo", grid_.lo}, {"hi", grid_.hi}, {"n", grid_.n}, {"h", grid_.h()}};
    j["nu"] = nu_;
    j["k"] = k_;
    j["lambda"] = lambda_;
    j["closure"] = closure_ == Closure::Neumann ? "neumann" : "dirichlet";
    std::vector<double> re, im;
    for (const auto& d : diag_) {
        re.push_back(d.real());
        im.push_back(d.imag());
    }
    j["diag_re"] = re;
    j["diag_im"] = im;
    j["off"] = off_;
    return j.dump();
}

TridiagonalOperator assemble(const ShearProfile& p, const Grid1D& grid, double nu, double k, double lambda,
                             Closure closure)
{
    require(grid.n >= 3, ErrorCode::InvalidGrid, "grid needs at least 3 nodes");
    require(p.domain().contains(grid.lo) && p.domain().contains(grid.hi), ErrorCode::InvalidGrid,
            "grid leaves the domain of " + p.name());
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = p(grid.node(i));
    return TridiagonalOperator(grid, std::move(v), nu, k, lambda, closure);
}

cplx inner(std::span<const cplx> f, std::span<const cplx> g, double h)
{
    require(f.size() == g.size(), ErrorCode::LengthMismatch, "inner product of different lengths");
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
    return acc * h;
}

double norm(std::span<const cplx> g, double h)
{
    double acc = 0.0;
    for (const auto& x : g) acc += std::norm(x);
    return std::sqrt(acc * h);
}

double grad_norm(std::span<const cplx> g, double h)
{
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) acc += std::norm(g[i + 1] - g[i]);
    return std::sqrt(acc / h);
}

double sup_norm(std::span<const cplx> g)
{
    double m = 0.0;
    for (const auto& x : g) m = std::max(m, std::abs(x));
    return m;
}

NumericalRangeResidual numerical_range_check(const TridiagonalOperator& op, std::span<const cplx> g)
{
    require(g.size() == op.n(), ErrorCode::LengthMismatch, "vector does not match the operator");
    const double h = op.grid().h();
    const double g2 = norm(g, h) * norm(g, h);
    require(g2 > 0.0, ErrorCode::ZeroVector, "numerical range check needs a nonzero vector");

    // Both sides are evaluated in extended precision with the stored
    // diffusion coefficient c = fl(nu/h^2). The identity is exact algebra in
    // c; one rounding of nu/h^2, or of the c|g|^2 terms in double, is already
    // above 1e-12 ||g||^2 on stiff grids (nu/h^2 ~ 1e4).
    using ld = long double;
    using lc = std::complex<ld>;
    const std::size_t n = g.size();
    const auto& d = op.diag();
    const auto& off = op.off();
    const auto& v = op.v_nodes();
    lc q = 0.0L;
    ld dg2 = 0.0L, weighted = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        lc hg = lc(d[i]) * lc(g[i]);
        if (i > 0) hg += static_cast<ld>(off[i - 1]) * lc(g[i - 1]);
        if (i + 1 < n) hg += static_cast<ld>(off[i]) * lc(g[i + 1]);
        q += hg * std::conj(lc(g[i]));
        weighted += (static_cast<ld>(v[i]) - op.lambda()) * std::norm(lc(g[i]));
        if (i + 1 < n) dg2 += std::norm(lc(g[i + 1]) - lc(g[i]));
    }
    q *= static_cast<ld>(h);
    dg2 /= static_cast<ld>(h);
    weighted *= static_cast<ld>(op.k()) * h;

    NumericalRangeResidual r;
    // With the Dirichlet closure the diffusion part also carries the boundary terms.
    ld boundary = 0.0L;
    if (op.closure() == Closure::Dirichlet)
        boundary = -static_cast<ld>(off.empty() ? 0.0 : off[0]) * h * (std::norm(lc(g.front())) + std::norm(lc(g.back())));
    const ld nu_h = off.empty() ? static_cast<ld>(op.nu()) : -static_cast<ld>(off[0]) * h * h;
    r.re_residual = static_cast<double>(std::abs(q.real() - nu_h * dg2 - boundary)) / g2;
    r.im_residual = static_cast<double>(std::abs(q.imag() - weighted)) / g2;
    return r;
}

double interpolation_ratio(std::span<const cplx> g, double h)
{
    const double denom = 2.0 * norm(g, h) * grad_norm(g, h);
    require(denom > 0.0, ErrorCode::ZeroVector, "interpolation ratio needs a non-constant vector");
    const double s = sup_norm(g);
    return s * s / denom;
}

double interpolation_inequality_check(std::span<const cplx> g, const Grid1D& grid, double edge_tol)
{
    require(g.size() == grid.n, ErrorCode::LengthMismatch, "vector does not match the grid");
    const double top = sup_norm(g);
    require(top > 0.0, ErrorCode::ZeroVector, "interpolation ratio needs a nonzero vector");
    if (std::abs(g.front()) >= edge_tol * top || std::abs(g.back()) >= edge_tol * top) {
        fail(ErrorCode::EdgeNotDecayed, "vector has not decayed at the ends of the grid");
    }
    return interpolation_ratio(g, grid.h());
}

} // namespace shear
