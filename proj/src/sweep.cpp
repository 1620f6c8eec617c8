// SPDX-License-Identifier: Apache-2.0
#include "shearlab/sweep.hpp"

#include "shearlab/errors.hpp"
#include "shearlab/krylov.hpp"
#include "shearlab/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <set>

namespace shear {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RateRow sweep_row(const ShearProfile& p, double nu, double k, const SweepOptions& opt)
{
    RateRow row;
    row.nu = nu;
    row.k = k;
    row.regime = classify_regime(nu, k);
    try {
        require(k != 0.0, ErrorCode::InvalidArgument, "sweep needs k != 0");
        const PsiEstimate est = pseudospectral_abscissa(p, nu, k, opt.search);
        row.psi = est.psi;
        row.lambda_star = est.lambda_star;
        row.grid_converged = est.grid_converged;
        row.truncation_converged = est.truncation_converged;
        row.n = est.grid.n;
        if (opt.with_semigroup) {
            const TimeGrid tg = default_time_grid(p, est.grid, nu, k, opt.horizon);
            const DecaySeries s = operator_norm_decay_on(p, est.grid, nu, k, tg.dt, tg.T, opt.decay);
            row.semigroup_rate = s.fitted_rate;
        }
    } catch (const Error& e) {
        row.psi = kNaN;
        row.error = e.what();
    }
    return row;
}

} // namespace

RateTable psi_sweep(const ShearProfile& p, const std::vector<double>& nu_list, const std::vector<double>& k_list,
                    const SweepOptions& options)
{
    require(!nu_list.empty() && !k_list.empty(), ErrorCode::InvalidArgument, "sweep lists must be nonempty");
    for (double k : k_list) require(k != 0.0, ErrorCode::InvalidArgument, "sweep needs k != 0");
    for (double nu : nu_list) require(nu > 0.0, ErrorCode::InvalidArgument, "sweep needs nu > 0");

    RateTable table;
    table.profile = p.name();
    table.m = p.m();
    const std::size_t nk = k_list.size();
    table.rows.resize(nu_list.size() * nk);
    const auto one = [&](std::size_t i) { table.rows[i] = sweep_row(p, nu_list[i / nk], k_list[i % nk], options); };
    if (options.exec == Exec::Parallel && table.rows.size() > 1) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(table.rows.size()); ++i) {
            one(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < table.rows.size(); ++i) one(i);
    }
    return table;
}

ScalingFit fit_scaling(const RateTable& table, Regime regime, std::size_t min_rows)
{
    std::vector<const RateRow*> use;
    for (const auto& r : table.rows) {
        if (r.regime == regime && r.grid_converged && r.error.empty() && r.psi > 0.0 && std::isfinite(r.psi)) {
            use.push_back(&r);
        }
    }
    if (use.size() < std::max<std::size_t>(min_rows, 2)) {
        fail(ErrorCode::InsufficientRows, "scaling fit needs at least " + std::to_string(min_rows) +
                                              " grid-converged rows in the regime, got " +
                                              std::to_string(use.size()));
    }

    std::set<double> nus, ks;
    for (const auto* r : use) {
        nus.insert(r->nu);
        ks.insert(std::abs(r->k));
    }
    ScalingFit fit;
    fit.regime = regime;
    fit.rows = use.size();
    fit.nu_identified = nus.size() > 1;
    fit.k_identified = ks.size() > 1;

    const auto N = static_cast<Eigen::Index>(use.size());
    const Eigen::Index cols = 1 + (fit.nu_identified ? 1 : 0) + (fit.k_identified ? 1 : 0);
    Eigen::MatrixXd X(N, cols);
    Eigen::VectorXd y(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto* r = use[static_cast<std::size_t>(i)];
        Eigen::Index c = 0;
        if (fit.nu_identified) X(i, c++) = std::log(r->nu);
        if (fit.k_identified) X(i, c++) = std::log(std::abs(r->k));
        X(i, c) = 1.0;
        y(i) = std::log(r->psi);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < cols) fail(ErrorCode::InsufficientRows, "scaling fit design matrix is rank deficient");
    const Eigen::VectorXd beta = qr.solve(y);
    Eigen::Index c = 0;
    if (fit.nu_identified) fit.exponent_nu = beta(c++);
    if (fit.k_identified) fit.exponent_k = beta(c++);
    fit.prefactor = std::exp(beta(c));

    const Eigen::VectorXd res = y - X * beta;
    const double ss_res = res.squaredNorm();
    const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

Grid1D factor_grid(const ShearProfile& p, double nu, double k, std::size_t n)
{
    const auto& d = p.domain();
    if (d.bounded()) return {d.a, d.b, n};
    const Truncation t = truncate_domain(p, nu, k);
    return {t.grid.lo, t.grid.hi, n};
}

void check_factor(const ShearProfile& p)
{
    const Interval w = default_window(p.domain(), 10.0);
    const auto pts = uniform_grid(w.lo, w.hi, 4001);
    const auto local = check_nondegeneracy(p, pts);
    if (!local.pass) {
        fail(ErrorCode::FactorCheckFailed, "factor " + p.name() + " is degenerate near y = " +
                                               std::to_string(local.witness_y));
    }
    const std::vector<double> radii{10.0, 100.0, 1000.0};
    const auto inf = check_infinity_nondegeneracy(p, radii);
    if (!inf.pass) fail(ErrorCode::FactorCheckFailed, "factor " + p.name() + " fails the check at infinity");
}

// Sparse matrix of alpha I + beta (H1 (x) I + I (x) H2), unknowns ordered i1 * n2 + i2.
SpMat kron_sum(const TridiagonalOperator& a, const TridiagonalOperator& b, cplx alpha, cplx beta)
{
    const auto n1 = static_cast<int>(a.n());
    const auto n2 = static_cast<int>(b.n());
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(5 * n1 * n2));
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const int r = i * n2 + j;
            t.emplace_back(r, r, alpha + beta * (a.diag()[static_cast<std::size_t>(i)] +
                                                 b.diag()[static_cast<std::size_t>(j)]));
            if (i > 0) t.emplace_back(r, r - n2, beta * a.off()[static_cast<std::size_t>(i - 1)]);
            if (i + 1 < n1) t.emplace_back(r, r + n2, beta * a.off()[static_cast<std::size_t>(i)]);
            if (j > 0) t.emplace_back(r, r - 1, beta * b.off()[static_cast<std::size_t>(j - 1)]);
            if (j + 1 < n2) t.emplace_back(r, r + 1, beta * b.off()[static_cast<std::size_t>(j)]);
        }
    }
    SpMat m(n1 * n2, n1 * n2);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

class CrankNicolson2D {
public:
    CrankNicolson2D(const TridiagonalOperator& a, const TridiagonalOperator& b, double dt)
    {
        const double h = 0.5 * dt;
        explicit_ = kron_sum(a, b, 1.0, -h);
        explicit_adj_ = SpMat(explicit_.adjoint());
        lu_.compute(kron_sum(a, b, 1.0, h));
        require(lu_.info() == Eigen::Success, ErrorCode::SingularMatrix, "2D Crank-Nicolson factorization failed");
        lu_adj_.compute(SpMat(kron_sum(a, b, 1.0, h).adjoint()));
        require(lu_adj_.info() == Eigen::Success, ErrorCode::SingularMatrix,
                "2D Crank-Nicolson factorization failed");
    }

    void step(Eigen::VectorXcd& g) const { g = lu_.solve(explicit_ * g); }
    void step_adjoint(Eigen::VectorXcd& g) const { g = explicit_adj_ * lu_adj_.solve(g).eval(); }

private:
    SpMat explicit_;
    SpMat explicit_adj_;
    Eigen::SparseLU<SpMat> lu_;
    Eigen::SparseLU<SpMat> lu_adj_;
};

} // namespace

TensorReport tensor_rate(const std::vector<ShearProfile>& factors, double nu, double k, const TensorOptions& options)
{
    require(!factors.empty(), ErrorCode::InvalidArgument, "tensor_rate needs at least one factor");
    require(nu > 0.0 && k != 0.0, ErrorCode::InvalidArgument, "tensor_rate needs nu > 0 and k != 0");
    for (const auto& f : factors) check_factor(f);

    TensorReport rep;
    for (const auto& f : factors) {
        rep.factor_targets.push_back(rate_target(nu, k, f.m()));
        rep.sum_rate += rep.factor_targets.back();
    }
    if (factors.size() != 2) return rep;

    if (options.n_axis > options.n_cap) {
        fail(ErrorCode::GridTooLarge, "2D grid is capped at " + std::to_string(options.n_cap) + " per axis");
    }
    require(options.n_axis >= 3 && options.checkpoints >= 1 && options.power_steps >= 1,
            ErrorCode::InvalidArgument, "bad tensor options");

    std::vector<Grid1D> grids;
    std::vector<TridiagonalOperator> ops;
    double spread = 0.0;
    for (const auto& f : factors) {
        grids.push_back(factor_grid(f, nu, k, options.n_axis));
        const TridiagonalOperator op = assemble(f, grids.back(), nu, k, 0.0);
        const auto [lo, hi] = std::minmax_element(op.v_nodes().begin(), op.v_nodes().end());
        spread += 0.5 * (*hi - *lo);
        // Shifting by the mid-range leaves every norm unchanged.
        ops.push_back(op.with_lambda(0.5 * (*lo + *hi)));
    }
    const double top_rate = *std::max_element(rep.factor_targets.begin(), rep.factor_targets.end());
    double dt = options.dt_factor / top_rate;
    if (spread > 0.0) dt = std::min(dt, options.phase_step / (std::abs(k) * spread));
    const double T = options.horizon / rep.sum_rate;

    // Per-factor 1D norms on the same time marks.
    DecayConfig dc;
    dc.checkpoints = options.checkpoints;
    // The 1D norms are cheap, so they are converged well past the 2D estimate.
    dc.power_steps = 200;
    dc.power_rtol = 1e-10;
    dc.seed = options.seed;
    dc.fit_t_lo = 0.0;
    std::vector<DecaySeries> one_d;
    for (std::size_t j = 0; j < 2; ++j) one_d.push_back(operator_norm_decay_on(factors[j], grids[j], nu, k, dt, T, dc));

    const TridiagonalOperator& a = ops[0];
    const TridiagonalOperator& b = ops[1];
    const CrankNicolson2D cn(a, b, dt);

    ProductCheck pc;
    pc.times = one_d[0].times;
    const std::size_t C = pc.times.size();
    std::vector<std::size_t> marks(C);
    for (std::size_t c = 0; c < C; ++c) marks[c] = static_cast<std::size_t>(std::llround(pc.times[c] / dt));

    const auto N = static_cast<Eigen::Index>(a.n() * b.n());
    SplitMix64 rng(options.seed);
    Eigen::VectorXcd x(N);
    for (Eigen::Index i = 0; i < N; ++i) x(i) = rng.complex_normal();
    x /= x.norm();

    pc.norm_2d.assign(C, 1.0);
    pc.product_1d.assign(C, 1.0);
    for (std::size_t c = 1; c < C; ++c) {
        // Lanczos on (R^s)^* R^s, warm-started from the previous checkpoint.
        const auto apply = [&](Eigen::VectorXcd& v) {
            for (std::size_t q = 0; q < marks[c]; ++q) cn.step(v);
            for (std::size_t q = 0; q < marks[c]; ++q) cn.step_adjoint(v);
        };
        const TopEigen top = lanczos_top(apply, x, options.krylov_dim, options.power_steps, options.power_rtol);
        pc.norm_2d[c] = std::sqrt(top.value);
        pc.product_1d[c] = one_d[0].norm_bounds[c] * one_d[1].norm_bounds[c];
    }
    for (std::size_t c = C - 1; c-- > 0;) pc.norm_2d[c] = std::max(pc.norm_2d[c], pc.norm_2d[c + 1]);

    for (std::size_t c = 0; c < C; ++c) {
        pc.rel_err = std::max(pc.rel_err, std::abs(pc.norm_2d[c] - pc.product_1d[c]) / pc.product_1d[c]);
    }
    pc.pass = pc.rel_err <= options.tolerance;
    rep.product_check = std::move(pc);
    return rep;
}

std::vector<CounterexampleRow> counterexample_scan(const ShearProfile& p, double nu, double k,
                                                   const std::vector<double>& L_list, const PsiSearch& search)
{
    require(p.domain().kind == DomainKind::HalfLineRight, ErrorCode::InvalidArgument,
            "counterexample scan needs a profile on a right half-line");
    for (std::size_t i = 0; i < L_list.size(); ++i) {
        require(L_list[i] > p.domain().a, ErrorCode::InvalidArgument, "truncation length must exceed the wall");
        require(i == 0 || L_list[i] > L_list[i - 1], ErrorCode::InvalidArgument, "L_list must be increasing");
    }
    std::vector<CounterexampleRow> out;
    for (double L : L_list) {
        PsiSearch s = search;
        s.policy.right_cut = L;
        s.check_truncation = false;
        const PsiEstimate e = pseudospectral_abscissa(p, nu, k, s);
        out.push_back({L, e.psi, e.lambda_star, e.grid_converged, e.grid.n});
    }
    return out;
}

std::vector<CounterexampleRow> counterexample_scan(double nu, double k, const std::vector<double>& L_list,
                                                   const PsiSearch& search)
{
    return counterexample_scan(profiles::taylor_couette(), nu, k, L_list, search);
}

} // namespace shear
