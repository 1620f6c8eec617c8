// SPDX-License-Identifier: Apache-2.0
#include "shearlab/semigroup.hpp"

#include "shearlab/errors.hpp"
#include "shearlab/rates.hpp"
#include "shearlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace shear {

namespace {

double euclid(std::span<const cplx> x)
{
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

void scale(std::span<cplx> x, double s)
{
    for (auto& v : x) v *= s;
}

} // namespace

CrankNicolson::CrankNicolson(const TridiagonalOperator& op, double dt)
    : op_(op), dt_(dt)
{
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::InvalidArgument, "time step must be positive");
    implicit_ = op_.factor_shifted(1.0, 0.5 * dt);
    if (implicit_.singular()) throw NumericalError(ErrorCode::SingularMatrix, "Crank-Nicolson step is singular");
}

void CrankNicolson::step(std::span<cplx> g, std::span<cplx> work) const
{
    const double a = 0.5 * dt_;
    op_.apply(g, work);
    for (std::size_t i = 0; i < g.size(); ++i) work[i] = g[i] - a * work[i];
    implicit_.solve(work);
    std::copy(work.begin(), work.end(), g.begin());
}

void CrankNicolson::step_adjoint(std::span<cplx> g, std::span<cplx> work) const
{
    const double a = 0.5 * dt_;
    std::copy(g.begin(), g.end(), work.begin());
    implicit_.solve_adjoint(work);
    op_.apply_adjoint(work, g);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = work[i] - a * g[i];
}

void CrankNicolson::advance(std::span<cplx> g, std::size_t steps) const
{
    CVector work(g.size());
    for (std::size_t s = 0; s < steps; ++s) step(g, work);
}

void CrankNicolson::advance_adjoint(std::span<cplx> g, std::size_t steps) const
{
    CVector work(g.size());
    for (std::size_t s = 0; s < steps; ++s) step_adjoint(g, work);
}

std::vector<NormSample> evolve_cn(const TridiagonalOperator& op, std::span<const cplx> g0, double dt, double T,
                                  std::size_t record_every)
{
    require(g0.size() == op.n(), ErrorCode::LengthMismatch, "initial data does not match the grid");
    require(T >= dt, ErrorCode::InvalidArgument, "horizon shorter than one step");
    require(record_every >= 1, ErrorCode::InvalidArgument, "record_every must be at least 1");
    const CrankNicolson cn(op, dt);
    const double h = op.grid().h();
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));

    CVector g(g0.begin(), g0.end()), work(g.size());
    std::vector<NormSample> out;
    out.push_back({0.0, norm(g, h)});
    for (std::size_t s = 1; s <= steps; ++s) {
        cn.step(g, work);
        if (s % record_every == 0 || s == steps) out.push_back({static_cast<double>(s) * dt, norm(g, h)});
    }
    return out;
}

TimeGrid default_time_grid(double nu, double k, int m, double horizon)
{
    require(horizon > 1.0, ErrorCode::InvalidArgument, "horizon must exceed the transient cut");
    const double rate = rate_target(nu, k, m);
    return {0.05 / rate, 1.0 / rate, horizon / rate};
}

namespace {

double mid_range(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return 0.5 * (*lo + *hi);
}

double half_range(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return 0.5 * (*hi - *lo);
}

} // namespace

TimeGrid default_time_grid(const ShearProfile& p, const Grid1D& grid, double nu, double k, double horizon,
                           double phase_step)
{
    require(phase_step > 0.0, ErrorCode::InvalidArgument, "phase_step must be positive");
    TimeGrid tg = default_time_grid(nu, k, p.m(), horizon);
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = p(grid.node(i));
    const double spread = std::abs(k) * half_range(v);
    if (spread > 0.0) tg.dt = std::min(tg.dt, phase_step / spread);
    return tg;
}

DecaySeries operator_norm_decay_on(const ShearProfile& p, const Grid1D& grid, double nu, double k, double dt,
                                   double T, const DecayConfig& config)
{
    require(config.ensemble_size >= 1, ErrorCode::InvalidArgument, "ensemble_size must be at least 1");
    require(config.power_steps >= 1 && config.checkpoints >= 1, ErrorCode::InvalidArgument,
            "power_steps and checkpoints must be positive");
    require(T >= dt, ErrorCode::InvalidArgument, "horizon shorter than one step");

    const TridiagonalOperator base = assemble(p, grid, nu, k, 0.0);
    const TridiagonalOperator op = base.with_lambda(mid_range(base.v_nodes()));
    const CrankNicolson cn(op, dt);
    const std::size_t n = op.n();
    const auto total = static_cast<std::size_t>(std::llround(T / dt));

    std::vector<std::size_t> marks{0};
    for (std::size_t j = 1; j <= config.checkpoints; ++j) {
        const auto s = static_cast<std::size_t>(std::llround(static_cast<double>(j * total) /
                                                             static_cast<double>(config.checkpoints)));
        if (s > marks.back()) marks.push_back(s);
    }
    const std::size_t C = marks.size();

    // Ensemble: independent trajectories, merged in member order.
    const auto E = static_cast<std::size_t>(config.ensemble_size);
    std::vector<std::vector<double>> ratio(E, std::vector<double>(C, 0.0));
    std::vector<CVector> starts(E);
    const auto member = [&](std::size_t e) {
        auto rng = SplitMix64::stream(config.seed, e);
        CVector g = random_complex_vector(n, rng);
        const double n0 = euclid(g);
        scale(g, 1.0 / n0);
        starts[e] = g;
        CVector work(n);
        ratio[e][0] = 1.0;
        for (std::size_t c = 1; c < C; ++c) {
            for (std::size_t s = marks[c - 1]; s < marks[c]; ++s) cn.step(g, work);
            ratio[e][c] = euclid(g);
        }
    };
    if (config.exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(E); ++e) member(static_cast<std::size_t>(e));
    } else {
        for (std::size_t e = 0; e < E; ++e) member(e);
    }

    DecaySeries out;
    out.method = config.method;
    out.dt = dt;
    out.nu = nu;
    out.k = k;
    out.grid = grid;
    out.times.resize(C);
    out.ensemble.assign(C, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        out.times[c] = static_cast<double>(marks[c]) * dt;
        for (std::size_t e = 0; e < E; ++e) out.ensemble[c] = std::max(out.ensemble[c], ratio[e][c]);
    }

    if (config.method == DecayMethod::Ensemble) {
        out.norm_bounds = out.ensemble;
    } else {
        // Power iteration on (R^s)^* R^s, warm-started across checkpoints.
        std::vector<double> est(C, 1.0);
        std::size_t best = 0;
        if (C > 1) {
            for (std::size_t e = 1; e < E; ++e) {
                if (ratio[e][1] > ratio[best][1]) best = e;
            }
        }
        CVector x = starts[best], y(n), work(n);
        for (std::size_t c = 1; c < C; ++c) {
            const std::size_t s = marks[c];
            double prev = 0.0;
            double top = 0.0;
            for (int it = 0; it < config.power_steps; ++it) {
                std::copy(x.begin(), x.end(), y.begin());
                for (std::size_t q = 0; q < s; ++q) cn.step(y, work);
                const double forward = euclid(y);
                for (std::size_t q = 0; q < s; ++q) cn.step_adjoint(y, work);
                const double gram = euclid(y);
                // x is unit, so both are lower bounds for ||R^s||.
                const double cur = std::max(forward, std::sqrt(gram));
                top = std::max(top, cur);
                if (gram == 0.0) break;
                std::copy(y.begin(), y.end(), x.begin());
                scale(x, 1.0 / gram);
                if (it > 0 && std::abs(cur - prev) <= config.power_rtol * cur) break;
                prev = cur;
            }
            est[c] = std::max(top, out.ensemble[c]);
        }
        for (std::size_t c = C - 1; c-- > 0;) est[c] = std::max(est[c], est[c + 1]);
        est[0] = 1.0;
        out.norm_bounds = std::move(est);
    }

    // Transient cut at 1 / rate; the whole series when there is no shear.
    const double t_lo = config.fit_t_lo ? *config.fit_t_lo : (k == 0.0 ? 0.0 : 1.0 / rate_target(nu, k, p.m()));
    out.fit_window = {t_lo, out.times.back()};
    std::size_t inside = 0;
    for (double t : out.times) inside += (t >= t_lo) ? 1 : 0;
    if (inside >= 5) {
        const RateFit fit = fit_decay_rate(out, out.fit_window);
        out.fitted_rate = std::max(0.0, fit.rate);
        out.residual = fit.residual;
    }
    return out;
}

DecaySeries operator_norm_decay(const ShearProfile& p, double nu, double k, double dt, double T,
                                const DecayConfig& config)
{
    const Truncation t = truncate_domain(p, nu, k);
    return operator_norm_decay_on(p, t.grid, nu, k, dt, T, config);
}

RateFit fit_decay_rate(std::span<const double> times, std::span<const double> norms, double t_lo, double t_hi)
{
    require(times.size() == norms.size(), ErrorCode::LengthMismatch, "times and norms differ in length");
    require(t_lo <= t_hi, ErrorCode::InvalidArgument, "empty fit window");
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= t_lo && times[i] <= t_hi && norms[i] > 0.0) {
            ts.push_back(times[i]);
            ys.push_back(-std::log(norms[i]));
        }
    }
    if (ts.size() < 5) fail(ErrorCode::WindowTooSmall, "fewer than 5 checkpoints inside the fit window");

    const double N = static_cast<double>(ts.size());
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        my += ys[i];
    }
    mt /= N;
    my /= N;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        sty += (ts[i] - mt) * (ys[i] - my);
    }
    require(stt > 0.0, ErrorCode::WindowTooSmall, "fit window has no spread in t");
    RateFit fit;
    fit.rate = sty / stt;
    fit.points = ts.size();
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (my + fit.rate * (ts[i] - mt));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / N);
    return fit;
}

RateFit fit_decay_rate(const DecaySeries& series, std::pair<double, double> window)
{
    return fit_decay_rate(series.times, series.norm_bounds, window.first, window.second);
}

WeiCheck check_wei_bound(const DecaySeries& series, double psi, double slack)
{
    WeiCheck w;
    w.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        const double bound = std::exp(std::numbers::pi / 2.0 - psi * t);
        const double s = 1.0 - series.norm_bounds[i] / bound;
        if (s < w.worst_slack) {
            w.worst_slack = s;
            w.worst_t = t;
        }
    }
    w.holds = w.worst_slack >= -slack;
    return w;
}

WeiCheck check_wei_bound(const DecaySeries& series, const PsiEstimate& psi, double slack)
{
    const bool same = series.grid.n == psi.grid.n && series.grid.lo == psi.grid.lo && series.grid.hi == psi.grid.hi
                      && series.nu == psi.nu && series.k == psi.k;
    if (!same) fail(ErrorCode::GridMismatch, "decay series and psi come from different operators");
    return check_wei_bound(series, psi.psi, slack);
}

} // namespace shear
