// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/rates.hpp"
#include "shearlab/resolvent.hpp"
#include "shearlab/semigroup.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shear {

struct RateRow {
    double nu = 0.0;
    double k = 0.0;
    double psi = 0.0;
    double lambda_star = 0.0;
    double semigroup_rate = std::numeric_limits<double>::quiet_NaN();   // NaN unless requested
    bool grid_converged = false;
    std::optional<bool> truncation_converged;
    Regime regime = Regime::Enhanced;
    std::size_t n = 0;
    std::string error;   // empty unless the row failed
};

struct RateTable {
    std::string profile;
    int m = 1;
    std::vector<RateRow> rows;
};

struct SweepOptions {
    PsiSearch search;
    bool with_semigroup = false;
    DecayConfig decay;
    double horizon = 12.0;   // semigroup horizon in units of 1 / rate_target
    Exec exec = Exec::Parallel;
};

/// One row per (nu, k), nu outer and k inner. Rows run concurrently; a row
/// that throws keeps its error message and a NaN psi.
RateTable psi_sweep(const ShearProfile& p, const std::vector<double>& nu_list, const std::vector<double>& k_list,
                    const SweepOptions& options = {});

struct ScalingFit {
    double exponent_nu = std::numeric_limits<double>::quiet_NaN();
    double exponent_k = std::numeric_limits<double>::quiet_NaN();
    bool nu_identified = false;
    bool k_identified = false;
    double prefactor = 0.0;
    double r_squared = 0.0;
    std::size_t rows = 0;
    Regime regime = Regime::Enhanced;
};

/// Ordinary least squares of log psi on (log nu, log |k|, 1) over the
/// grid-converged rows of one regime. A regressor with a single distinct
/// value is dropped and reported as not identified.
ScalingFit fit_scaling(const RateTable& table, Regime regime, std::size_t min_rows = 4);

struct TensorOptions {
    std::size_t n_axis = 160;          // cells per axis of the 2D grid
    std::size_t n_cap = 200;
    std::size_t checkpoints = 10;
    double horizon = 8.0;              // T = horizon / sum_rate
    double dt_factor = 0.05;           // dt = dt_factor / max per-factor rate
    double phase_step = 0.2;           // and |k| (half range of v_1 + v_2) dt <= phase_step
    int power_steps = 20;              // operator applications per checkpoint
    int krylov_dim = 12;
    double power_rtol = 1e-4;          // enough for a percent-level comparison
    std::uint64_t seed = 7;
    double tolerance = 0.05;           // relative mismatch allowed in the product check
};

struct ProductCheck {
    std::vector<double> times;
    std::vector<double> norm_2d;
    std::vector<double> product_1d;
    double rel_err = 0.0;              // max over checkpoints
    bool pass = false;
};

struct TensorReport {
    std::vector<double> factor_targets;
    double sum_rate = 0.0;
    std::optional<ProductCheck> product_check;   // only for two factors
};

/// Separable profile v(y_1, ..., y_d) = sum_j v_j(y_j). Every factor must
/// pass its non-degeneracy checks (FactorCheckFailed otherwise). For d = 2
/// the Kronecker-sum operator is evolved directly by Crank-Nicolson on the
/// tensor grid and its operator norm compared with the product of the 1D
/// norms.
TensorReport tensor_rate(const std::vector<ShearProfile>& factors, double nu, double k,
                         const TensorOptions& options = {});

struct CounterexampleRow {
    double L = 0.0;
    double psi = 0.0;
    double lambda_star = 0.0;
    bool grid_converged = false;
    std::size_t n = 0;
};

/// psi of the profile truncated at y = L for each L (the profile must live on
/// a right half-line). The default profile is taylor_couette on (1, L).
std::vector<CounterexampleRow> counterexample_scan(const ShearProfile& p, double nu, double k,
                                                   const std::vector<double>& L_list,
                                                   const PsiSearch& search = {});
std::vector<CounterexampleRow> counterexample_scan(double nu, double k, const std::vector<double>& L_list,
                                                   const PsiSearch& search = {});

} // namespace shear
