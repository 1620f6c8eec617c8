// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace shear {

struct TopEigen {
    double value = 0.0;      // largest Ritz value, a lower bound for the top eigenvalue
    int matvecs = 0;
    bool converged = false;
    bool breakdown = false;  // the operator returned a non-finite vector
};

/// Largest eigenvalue of a Hermitian positive semidefinite operator by
/// restarted Lanczos with full reorthogonalization. `apply(v)` overwrites v
/// with M v. `x` holds the start vector and receives the top Ritz vector.
///
/// Stops when the Ritz value stalls (relative change <= tol) with residual
/// <= sqrt(tol) theta, or when the residual alone is <= tol theta. A stalled
/// value can sit inside a cluster, hence the residual test.
template <class Apply>
TopEigen lanczos_top(Apply&& apply, Eigen::VectorXcd& x, int krylov_dim, int max_matvecs, double tol)
{
    TopEigen out;
    const Eigen::Index n = x.size();
    const Eigen::Index kmax = std::max<Eigen::Index>(2, std::min<Eigen::Index>(krylov_dim, n));
    Eigen::MatrixXcd Q(n, kmax);
    Eigen::VectorXcd w(n);
    std::vector<double> alpha, beta;
    double prev = 0.0;
    while (out.matvecs < max_matvecs) {
        Q.col(0) = x / x.norm();
        alpha.clear();
        beta.clear();
        Eigen::VectorXd top;
        bool done = false;
        for (Eigen::Index j = 0; j < kmax && out.matvecs < max_matvecs; ++j) {
            w = Q.col(j);
            apply(w);
            ++out.matvecs;
            if (!std::isfinite(w.norm())) {
                out.breakdown = true;
                return out;
            }
            alpha.push_back(Q.col(j).dot(w).real());
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXcd c = Q.leftCols(j + 1).adjoint() * w;
                w.noalias() -= Q.leftCols(j + 1) * c;
            }
            const double b = w.norm();

            const auto m = static_cast<Eigen::Index>(alpha.size());
            const Eigen::VectorXd dg = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
            const Eigen::VectorXd sd = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
            eig.computeFromTridiagonal(dg, sd, Eigen::ComputeEigenvectors);
            const double theta = eig.eigenvalues()(m - 1);
            top = eig.eigenvectors().col(m - 1);
            out.value = theta;

            const double resid = b * std::abs(top(m - 1));
            const bool stalled = prev > 0.0 && std::abs(theta - prev) <= tol * theta;
            prev = theta;
            if ((stalled && resid <= std::sqrt(tol) * theta) || resid <= tol * theta || b <= 1e-14 * theta) {
                done = true;
                break;
            }
            if (j + 1 < kmax) {
                beta.push_back(b);
                Q.col(j + 1) = w / b;
            }
        }
        x = Q.leftCols(static_cast<Eigen::Index>(alpha.size())) * top.cast<std::complex<double>>();
        x /= x.norm();
        if (done) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

} // namespace shear
