// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/exec.hpp"
#include "shearlab/operator.hpp"
#include "shearlab/rates.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace shear {

struct SigmaOptions {
    double tol = 1e-12;          // relative change of successive estimates
    int single_iter = 30;        // plain inverse iteration steps before switching to Lanczos
    int krylov_dim = 80;         // Lanczos basis size before a restart
    int max_iter = 2000;         // Lanczos steps over all restarts
    bool dense_fallback = true;  // dense SVD when inverse iteration stalls
    std::size_t dense_limit = 2000;
};

enum class SigmaMethod { InverseIteration, Dense, Singular };

struct SigmaResult {
    double sigma = 0.0;
    int iterations = 0;
    bool converged = false;
    SigmaMethod method = SigmaMethod::InverseIteration;
};

/// Smallest singular value of a complex tridiagonal matrix by inverse
/// iteration on A^* A: alternate solves with A and A^* through one pivoted
/// LU factorization. A single vector is tried first; when the two smallest
/// singular values cluster (symmetric profiles, long flat tails) it switches
/// to restarted Lanczos on (A A^*)^{-1} with full reorthogonalization, each
/// step again one solve with A and one with A^*. No dense fallback.
///
/// When `warm` holds a vector of matching length it is used as the starting
/// vector and overwritten with the final iterate.
SigmaResult inverse_iteration_sigma_min(std::span<const cplx> lower, std::span<const cplx> diag,
                                        std::span<const cplx> upper, const SigmaOptions& opt = {},
                                        CVector* warm = nullptr);

/// Dense SVD of the same matrix (used as fallback for small n).
double dense_sigma_min(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper);

/// sigma_min(H) for an assembled operator. Falls back to the dense SVD when
/// inverse iteration does not converge and n <= dense_limit; otherwise
/// throws NumericalError(NoConvergence).
SigmaResult smallest_singular_value(const TridiagonalOperator& op, const SigmaOptions& opt = {},
                                    CVector* warm = nullptr);

/// sigma_min(H - i k lambda) for each lambda. Failures are recorded as
/// non-converged entries (sigma = NaN) instead of aborting the scan.
std::vector<SigmaResult> sigma_scan(const TridiagonalOperator& op, std::span<const double> lambdas,
                                    const SigmaOptions& opt = {}, Exec exec = Exec::Parallel);

struct ResolventPoint {
    double lambda = 0.0;
    double sigma_min = 0.0;
    bool converged = true;
};

std::vector<ResolventPoint> resolvent_profile(const ShearProfile& p, double nu, double k,
                                              std::span<const double> lambda_grid,
                                              const TruncationPolicy& policy = {}, const SigmaOptions& opt = {},
                                              Exec exec = Exec::Parallel);

struct PsiSearch {
    std::size_t coarse_points = 512;      // minimum; see samples_per_valley
    double samples_per_valley = 2.0;      // scan points per rate_target/|k| in lambda
    std::size_t max_coarse_points = 20000;
    double refine_tol = 1e-4;     // final golden-section bracket relative to the initial bracket
    bool check_grid = true;       // compare against the operator on the refined grid (2n)
    bool check_truncation = false;// recompute with doubled truncation on unbounded sides
    double convergence_rtol = 0.01;
    SigmaOptions sigma;
    TruncationPolicy policy;
    Exec exec = Exec::Parallel;
    bool keep_scan = true;
};

struct PsiEstimate {
    std::string profile;
    double nu = 0.0;
    double k = 0.0;
    double psi = 0.0;
    double lambda_star = 0.0;
    std::vector<std::pair<double, double>> scan;
    bool refined = false;
    std::size_t local_minima = 0;
    bool grid_converged = false;
    double psi_refined_grid = 0.0;
    std::optional<bool> truncation_converged;
    std::optional<double> psi_doubled_truncation;
    bool zero_on_axis = false;
    bool solver_converged = true;
    Grid1D grid;
    double cut = 0.0;
};

/// Psi(H) = inf over lambda of sigma_min(H - i k lambda): coarse scan of
/// lambda over the range of v widened by 2 rate_target/|k| (plus the
/// critical values of v), golden-section refinement of every local minimum
/// of the scan that can still beat the incumbent (sigma_min(H - i k lambda)
/// is |k|-Lipschitz in lambda, which gives a lower bound on every bracket),
/// then the grid-doubling (and optionally truncation-doubling)
/// diagnostics.
PsiEstimate pseudospectral_abscissa(const ShearProfile& p, double nu, double k, const PsiSearch& search = {});

/// Same search on a caller-supplied grid (no truncation policy applied).
PsiEstimate pseudospectral_abscissa_on(const ShearProfile& p, const Grid1D& grid, double nu, double k,
                                       const PsiSearch& search = {});

struct CertificateReport {
    bool ineq_imaginary = false;
    bool ineq_outside = false;
    bool ineq_inside = false;
    bool ineq_full = false;
    // (rhs - lhs) / rhs for each inequality, in the order above
    double slack_imaginary = 0.0;
    double slack_outside = 0.0;
    double slack_inside = 0.0;
    double slack_full = 0.0;
    double lhs_inside = 0.0;
    double measure_Ecal = 0.0;
    bool all() const { return ineq_imaginary && ineq_outside && ineq_inside && ineq_full; }
};

/// Evaluate both sides of the four resolvent inequalities
///   |k| <chi (v - lambda) g, g>  <=  ||Hg|| ||g|| + nu/delta ||Dg|| ||g||
///   int_{outside} |g|^2          <=  |k|^-1 delta^-m ||Hg|| ||g|| + nu^1/2 |k|^-1 delta^-m-1 ||Hg||^1/2 ||g||^3/2
///   int_{inside} |g|^2           <=  2 nu^-1/2 m(Ecal) ||Hg||^1/2 ||g||^3/2
///   ||g||^2                      <=  sum of the two right-hand sides above
/// for H = H_{nu,k,lambda} on the given grid, with chi and Ecal from the
/// level-set module.
CertificateReport resolvent_certificate(const ShearProfile& p, const Grid1D& grid, double nu, double k,
                                        double lambda, double delta, int m, std::span<const cplx> g);

std::string to_string(SigmaMethod m);

} // namespace shear
