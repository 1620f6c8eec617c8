// SPDX-License-Identifier: Apache-2.0
#include "shearlab/resolvent.hpp"

#include "shearlab/errors.hpp"
#include "shearlab/krylov.hpp"
#include "shearlab/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace shear {

std::string to_string(SigmaMethod m)
{
    switch (m) {
    case SigmaMethod::InverseIteration: return "inverse_iteration";
    case SigmaMethod::Dense: return "dense";
    case SigmaMethod::Singular: return "singular";
    }
    return "?";
}

namespace {

constexpr std::uint64_t kStartSeed = 0x5EEDF00DULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double euclid(std::span<const cplx> x)
{
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return std::sqrt(acc);
}

void scale(std::span<cplx> x, double s)
{
    for (auto& v : x) v *= s;
}

struct Bands {
    CVector lower, diag, upper;
};

Bands bands_of(const TridiagonalOperator& op)
{
    Bands b;
    b.diag = op.diag();
    b.lower.assign(op.off().begin(), op.off().end());
    b.upper = b.lower;
    return b;
}

} // namespace

SigmaResult inverse_iteration_sigma_min(std::span<const cplx> lower, std::span<const cplx> diag,
                                        std::span<const cplx> upper, const SigmaOptions& opt, CVector* warm)
{
    require(opt.tol > 0.0 && opt.max_iter > 0 && opt.single_iter > 0 && opt.krylov_dim >= 2,
            ErrorCode::InvalidArgument, "bad singular value options");
    SigmaResult r;
    const TridiagonalLU lu(lower, diag, upper);
    if (lu.singular()) {
        r.sigma = 0.0;
        r.converged = true;
        r.method = SigmaMethod::Singular;
        return r;
    }

    const std::size_t n = diag.size();
    SplitMix64 rng(kStartSeed);
    CVector x;
    if (warm && warm->size() == n && euclid(*warm) > 0.0) {
        x = *warm;
    } else {
        x = random_complex_vector(n, rng);
    }
    scale(x, 1.0 / euclid(x));

    const auto singular = [&](int it) {
        r.sigma = 0.0;
        r.iterations = it;
        r.converged = true;
        r.method = SigmaMethod::Singular;
        return r;
    };

    // Single vector: ||A^{-1} x|| for unit x increases monotonically to 1/sigma_min.
    double prev = 0.0;
    CVector y(n);
    for (int it = 1; it <= opt.single_iter; ++it) {
        std::copy(x.begin(), x.end(), y.begin());
        lu.solve(y);
        const double ny = euclid(y);
        if (!std::isfinite(ny) || ny > 1e300) return singular(it);
        const double est = 1.0 / ny;
        r.iterations = it;
        r.sigma = est;
        if (it > 1 && std::abs(prev - est) <= opt.tol * est) {
            r.converged = true;
            if (warm) *warm = std::move(x);
            return r;
        }
        prev = est;
        std::copy(y.begin(), y.end(), x.begin());
        scale(x, 1.0 / ny);
        lu.solve_adjoint(x);
        scale(x, 1.0 / euclid(x));
    }

    // Lanczos on M = A^{-*} A^{-1}, seeded with the current iterate. Ritz
    // values increase toward 1 / sigma_min^2 from below.
    Eigen::VectorXcd xv = Eigen::Map<const Eigen::VectorXcd>(x.data(), static_cast<Eigen::Index>(n));
    bool blew_up = false;
    const auto apply = [&](Eigen::VectorXcd& v) {
        std::span<cplx> vs(v.data(), n);
        lu.solve(vs);
        lu.solve_adjoint(vs);
        if (v.norm() > 1e300) blew_up = true;
    };
    const TopEigen top = lanczos_top(apply, xv, opt.krylov_dim, opt.max_iter, opt.tol);
    if (blew_up || top.breakdown) return singular(opt.single_iter + top.matvecs);
    r.iterations = opt.single_iter + top.matvecs;
    r.sigma = 1.0 / std::sqrt(top.value);
    r.converged = top.converged;
    if (r.converged && warm) warm->assign(xv.data(), xv.data() + xv.size());
    return r;
}

double dense_sigma_min(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper)
{
    const auto n = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) {
            a(i + 1, i) = lower[static_cast<std::size_t>(i)];
            a(i, i + 1) = upper[static_cast<std::size_t>(i)];
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    return svd.singularValues().minCoeff();
}

SigmaResult smallest_singular_value(const TridiagonalOperator& op, const SigmaOptions& opt, CVector* warm)
{
    const Bands b = bands_of(op);
    SigmaResult r = inverse_iteration_sigma_min(b.lower, b.diag, b.upper, opt, warm);
    if (r.converged) return r;
    if (opt.dense_fallback && op.n() <= opt.dense_limit) {
        r.sigma = dense_sigma_min(b.lower, b.diag, b.upper);
        r.method = SigmaMethod::Dense;
        r.converged = true;
        return r;
    }
    throw NumericalError(ErrorCode::NoConvergence,
                         "inverse iteration did not converge in " + std::to_string(opt.max_iter) + " steps");
}

std::vector<SigmaResult> sigma_scan(const TridiagonalOperator& op, std::span<const double> lambdas,
                                    const SigmaOptions& opt, Exec exec)
{
    std::vector<SigmaResult> out(lambdas.size());
    auto one = [&](std::size_t i) {
        try {
            out[i] = smallest_singular_value(op.with_lambda(lambdas[i]), opt);
        } catch (const NumericalError&) {
            out[i] = SigmaResult{kNaN, opt.max_iter, false, SigmaMethod::InverseIteration};
        }
    };
    if (exec == Exec::Parallel && !in_parallel_region()) {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lambdas.size()); ++i) {
            one(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < lambdas.size(); ++i) one(i);
    }
    return out;
}

std::vector<ResolventPoint> resolvent_profile(const ShearProfile& p, double nu, double k,
                                              std::span<const double> lambda_grid, const TruncationPolicy& policy,
                                              const SigmaOptions& opt, Exec exec)
{
    require(std::is_sorted(lambda_grid.begin(), lambda_grid.end()), ErrorCode::InvalidArgument,
            "lambda grid must be sorted");
    const Truncation t = truncate_domain(p, nu, k, policy);
    const TridiagonalOperator op = assemble(p, t.grid, nu, k, 0.0);
    const auto sig = sigma_scan(op, lambda_grid, opt, exec);
    std::vector<ResolventPoint> out(lambda_grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {lambda_grid[i], sig[i].sigma, sig[i].converged};
    }
    return out;
}

namespace {

struct Evaluator {
    const TridiagonalOperator& op;
    const SigmaOptions& opt;
    bool all_converged = true;
    CVector warm{};

    double operator()(double lambda)
    {
        try {
            return smallest_singular_value(op.with_lambda(lambda), opt, &warm).sigma;
        } catch (const NumericalError&) {
            all_converged = false;
            return std::numeric_limits<double>::infinity();
        }
    }
};

struct Minimum {
    double lambda;
    double sigma;
};

// Golden-section search on [a, b], seeded with the known interior value.
Minimum golden(Evaluator& f, double a, double b, double tol)
{
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

std::vector<double> scan_points(const ShearProfile& p, const Grid1D& grid, const TridiagonalOperator& op,
                                double margin, std::size_t coarse)
{
    const auto& v = op.v_nodes();
    const auto [vmin_it, vmax_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *vmin_it - margin;
    const double hi = *vmax_it + margin;
    std::vector<double> pts = uniform_grid(lo, hi, std::max<std::size_t>(coarse, 3));

    // Critical values of v are where the narrowest resolvent valleys sit.
    try {
        for (const auto& piece : find_monotone_pieces(p, grid.window())) {
            pts.push_back(p(piece.lo));
            pts.push_back(p(piece.hi));
        }
    } catch (const Error&) {
        // degenerate profiles still get the uniform scan
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [&](double a, double b) { return std::abs(a - b) <= 1e-12 * (hi - lo); }),
              pts.end());
    return pts;
}

PsiEstimate search_on(const ShearProfile& p, const Grid1D& grid, double cut, double nu, double k,
                      const PsiSearch& s)
{
    PsiEstimate est;
    est.profile = p.name();
    est.nu = nu;
    est.k = k;
    est.grid = grid;
    est.cut = cut;

    const TridiagonalOperator op = assemble(p, grid, nu, k, 0.0);
    if (k == 0.0) {
        // heat-equation path: the shift i k lambda vanishes identically
        const SigmaResult r = smallest_singular_value(op, s.sigma);
        est.psi = r.sigma;
        est.zero_on_axis = r.sigma <= 1e-12 * std::abs(op.diag()[1]);
        if (est.zero_on_axis) est.psi = 0.0;
        est.grid_converged = true;
        est.psi_refined_grid = est.psi;
        return est;
    }

    const double valley = rate_target(nu, k, p.m()) / std::abs(k);
    const double margin = 2.0 * valley;
    const auto [vmin, vmax] = std::minmax_element(op.v_nodes().begin(), op.v_nodes().end());
    const double range = *vmax - *vmin + 2.0 * margin;
    const auto resolved = static_cast<std::size_t>(std::ceil(s.samples_per_valley * range / valley)) + 1;
    const std::size_t coarse = std::clamp(resolved, s.coarse_points, std::max(s.coarse_points, s.max_coarse_points));
    const std::vector<double> lambdas = scan_points(p, grid, op, margin, coarse);
    const auto sig = sigma_scan(op, lambdas, s.sigma, s.exec);

    std::vector<double> values(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) {
        values[i] = sig[i].converged ? sig[i].sigma : std::numeric_limits<double>::infinity();
        if (!sig[i].converged) est.solver_converged = false;
    }
    if (s.keep_scan) {
        est.scan.reserve(lambdas.size());
        for (std::size_t i = 0; i < lambdas.size(); ++i) est.scan.emplace_back(lambdas[i], sig[i].sigma);
    }

    const std::size_t ns = values.size();
    std::size_t best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    est.psi = values[best];
    est.lambda_star = lambdas[best];

    const double ak = std::abs(k);
    const double inf = std::numeric_limits<double>::infinity();
    struct Candidate {
        std::size_t index;
        double lower_bound;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < ns; ++i) {
        const double left = i > 0 ? values[i - 1] : inf;
        const double right = i + 1 < ns ? values[i + 1] : inf;
        if (!(values[i] <= left && values[i] <= right && (values[i] < left || values[i] < right))) continue;
        ++est.local_minima;
        // Lipschitz lower bound of sigma on [lambda_{i-1}, lambda_{i+1}]
        double lb = values[i];
        if (i > 0) lb = std::min(lb, 0.5 * (values[i - 1] + values[i] - ak * (lambdas[i] - lambdas[i - 1])));
        if (i + 1 < ns) lb = std::min(lb, 0.5 * (values[i + 1] + values[i] - ak * (lambdas[i + 1] - lambdas[i])));
        candidates.push_back({i, lb});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const Candidate& a, const Candidate& b) { return values[a.index] < values[b.index]; });

    Evaluator f{op, s.sigma};
    for (const auto& c : candidates) {
        if (c.lower_bound >= est.psi) continue;
        const std::size_t i = c.index;
        const double a = lambdas[i > 0 ? i - 1 : i];
        const double b = lambdas[i + 1 < ns ? i + 1 : i];
        if (b <= a) continue;
        f.warm.clear();
        const Minimum m = golden(f, a, b, s.refine_tol * (b - a));
        est.refined = true;
        if (m.sigma < est.psi) {
            est.psi = m.sigma;
            est.lambda_star = m.lambda;
        }
    }
    if (!f.all_converged) est.solver_converged = false;

    if (s.check_grid) {
        const TridiagonalOperator fine = assemble(p, grid.refined(), nu, k, 0.0);
        Evaluator g{fine, s.sigma};
        const double spacing = (lambdas.back() - lambdas.front()) / static_cast<double>(ns - 1);
        const Minimum m = golden(g, est.lambda_star - 2.0 * spacing, est.lambda_star + 2.0 * spacing,
                                 s.refine_tol * spacing);
        est.psi_refined_grid = std::min(m.sigma, g(est.lambda_star));
        est.grid_converged = std::abs(est.psi_refined_grid - est.psi) <= s.convergence_rtol * est.psi;
        if (!g.all_converged) est.solver_converged = false;
    }
    return est;
}

} // namespace

PsiEstimate pseudospectral_abscissa_on(const ShearProfile& p, const Grid1D& grid, double nu, double k,
                                       const PsiSearch& search)
{
    return search_on(p, grid, 0.0, nu, k, search);
}

PsiEstimate pseudospectral_abscissa(const ShearProfile& p, double nu, double k, const PsiSearch& search)
{
    const Truncation t = truncate_domain(p, nu, k, search.policy);
    PsiEstimate est = search_on(p, t.grid, t.cut, nu, k, search);
    if (search.check_truncation && !p.domain().bounded() && k != 0.0) {
        const Truncation t2 = doubled_truncation(p, nu, k, search.policy);
        PsiSearch s2 = search;
        s2.check_grid = false;
        s2.keep_scan = false;
        const PsiEstimate wide = search_on(p, t2.grid, t2.cut, nu, k, s2);
        est.psi_doubled_truncation = wide.psi;
        est.truncation_converged = std::abs(wide.psi - est.psi) <= search.convergence_rtol * est.psi;
        if (!wide.solver_converged) est.solver_converged = false;
    }
    return est;
}

CertificateReport resolvent_certificate(const ShearProfile& p, const Grid1D& grid, double nu, double k,
                                        double lambda, double delta, int m, std::span<const cplx> g)
{
    require(g.size() == grid.n, ErrorCode::LengthMismatch, "vector does not match the grid");
    require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
    require(k != 0.0, ErrorCode::InvalidArgument, "certificate needs k != 0");
    const double h = grid.h();
    const double gn = norm(g, h);
    require(gn > 0.0, ErrorCode::ZeroVector, "certificate needs a nonzero vector");

    const TridiagonalOperator op = assemble(p, grid, nu, k, lambda);
    const CVector hg = op.apply(g);
    const double hgn = norm(hg, h);
    const double dgn = grad_norm(g, h);
    const double ak = std::abs(k);

    const CutoffFunction chi(p, lambda, delta, m, grid.window());
    double weighted = 0.0;
    double outside = 0.0;
    double inside = 0.0;
    const auto& v = op.v_nodes();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = grid.node(i);
        const double w = std::norm(g[i]) * h;
        weighted += chi(y) * (v[i] - lambda) * w;
        if (chi.in_neighborhood(y)) {
            inside += w;
        } else {
            outside += w;
        }
    }

    const auto slack = [](double lhs, double rhs) {
        if (rhs > 0.0) return (rhs - lhs) / rhs;
        return lhs <= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    };
    constexpr double kRel = 1e-8;

    CertificateReport r;
    const double lhs_im = ak * weighted;
    const double rhs_im = hgn * gn + nu / delta * dgn * gn;
    r.slack_imaginary = slack(lhs_im, rhs_im);
    r.ineq_imaginary = lhs_im <= rhs_im * (1.0 + kRel);

    const double dm = std::pow(delta, m);
    const double half = std::sqrt(hgn) * std::pow(gn, 1.5);
    const double rhs_out = hgn * gn / (ak * dm) + std::sqrt(nu) / (ak * dm * delta) * half;
    r.slack_outside = slack(outside, rhs_out);
    r.ineq_outside = outside <= rhs_out * (1.0 + kRel);

    r.measure_Ecal = chi.neighborhood().measure;
    r.lhs_inside = inside;
    const double rhs_in = 2.0 / std::sqrt(nu) * r.measure_Ecal * half;
    r.slack_inside = slack(inside, rhs_in);
    r.ineq_inside = inside <= rhs_in * (1.0 + kRel);

    const double lhs_full = gn * gn;
    const double rhs_full = rhs_out + rhs_in;
    r.slack_full = slack(lhs_full, rhs_full);
    r.ineq_full = lhs_full <= rhs_full * (1.0 + kRel);
    return r;
}

} // namespace shear
