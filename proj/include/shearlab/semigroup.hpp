// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/exec.hpp"
#include "shearlab/operator.hpp"
#include "shearlab/resolvent.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace shear {

/// Crank-Nicolson propagator R = (I + dt/2 H)^{-1} (I - dt/2 H). For
/// accretive H every step is a contraction in the h-weighted norm.
class CrankNicolson {
public:
    CrankNicolson(const TridiagonalOperator& op, double dt);

    double dt() const { return dt_; }
    std::size_t size() const { return op_.n(); }
    const TridiagonalOperator& op() const { return op_; }

    /// g <- R g. `work` must have the same length as g.
    void step(std::span<cplx> g, std::span<cplx> work) const;
    /// g <- R^* g, the adjoint step (I - dt/2 H^*)(I + dt/2 H^*)^{-1}.
    void step_adjoint(std::span<cplx> g, std::span<cplx> work) const;

    void advance(std::span<cplx> g, std::size_t steps) const;
    void advance_adjoint(std::span<cplx> g, std::size_t steps) const;

private:
    TridiagonalOperator op_;
    double dt_;
    TridiagonalLU implicit_;
};

struct NormSample {
    double t = 0.0;
    double norm = 0.0;
};

/// Evolves g0 under g' + Hg = 0 and records ||g||_h every `record_every` steps
/// (t = 0 included). T is rounded to a whole number of steps.
std::vector<NormSample> evolve_cn(const TridiagonalOperator& op, std::span<const cplx> g0, double dt, double T,
                                  std::size_t record_every = 1);

enum class DecayMethod { Ensemble, AdjointPowerIteration };

struct DecayConfig {
    int ensemble_size = 8;
    int power_steps = 20;
    double power_rtol = 1e-6;      // early exit of the power iteration at a checkpoint
    std::size_t checkpoints = 48;  // uniformly spaced in t, t = 0 excluded
    std::uint64_t seed = 1;
    DecayMethod method = DecayMethod::AdjointPowerIteration;
    std::optional<double> fit_t_lo;   // default 1 / rate_target
    Exec exec = Exec::Parallel;
};

struct DecaySeries {
    std::vector<double> times;
    std::vector<double> norm_bounds;    // estimates of ||exp(-tH)||
    std::vector<double> ensemble;       // max over random data of ||g(t)|| / ||g0||
    DecayMethod method = DecayMethod::AdjointPowerIteration;
    double fitted_rate = 0.0;
    std::pair<double, double> fit_window{0.0, 0.0};
    double residual = 0.0;
    double dt = 0.0;
    double nu = 0.0;
    double k = 0.0;
    Grid1D grid;
};

struct TimeGrid {
    double dt = 0.0;
    double t_lo = 0.0;
    double T = 0.0;
};

/// dt = 0.05 / rate, fit window from 1 / rate, horizon `horizon` / rate, with
/// the rate from the two-regime formula.
TimeGrid default_time_grid(double nu, double k, int m, double horizon = 12.0);

/// As above, with dt further capped so that |k| max|v - c| dt <= phase_step on
/// the grid (c the mid-range of v). Crank-Nicolson maps the rotation
/// exp(-i k v dt) to the phase 2 atan(k v dt / 2), which flattens the shear
/// wherever k v dt is not small and slows the phase mixing that drives the
/// decay.
TimeGrid default_time_grid(const ShearProfile& p, const Grid1D& grid, double nu, double k, double horizon = 12.0,
                           double phase_step = 0.2);

/// Operator-norm decay on an explicit grid. Both the ensemble lower bound and
/// the power-iteration estimate are recorded; `norm_bounds` holds the one
/// selected by `config.method`. Power estimates are lower bounds for the
/// true norm, so they are lifted to the running maximum from later times
/// (the true norm is nonincreasing) and to the ensemble value. The operator is
/// evolved with lambda at the mid-range of v, which leaves every norm
/// unchanged and keeps the phase per step small.
DecaySeries operator_norm_decay_on(const ShearProfile& p, const Grid1D& grid, double nu, double k, double dt,
                                   double T, const DecayConfig& config = {});

/// Same on the default truncation of the profile.
DecaySeries operator_norm_decay(const ShearProfile& p, double nu, double k, double dt, double T,
                                const DecayConfig& config = {});

struct RateFit {
    double rate = 0.0;
    double residual = 0.0;   // root mean square of the log residuals
    std::size_t points = 0;
};

/// Least-squares slope of -log(norm) against t over [t_lo, t_hi].
RateFit fit_decay_rate(std::span<const double> times, std::span<const double> norms, double t_lo, double t_hi);
RateFit fit_decay_rate(const DecaySeries& series, std::pair<double, double> window);

struct WeiCheck {
    bool holds = false;
    double worst_slack = 0.0;   // min over checkpoints of 1 - norm / bound
    double worst_t = 0.0;
};

/// norm(t) <= exp(pi/2 - psi t) (1 + slack) at every checkpoint.
WeiCheck check_wei_bound(const DecaySeries& series, const PsiEstimate& psi, double slack = 0.02);
WeiCheck check_wei_bound(const DecaySeries& series, double psi, double slack = 0.02);

} // namespace shear
