// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "shearlab/errors.hpp"
#include "shearlab/exec.hpp"
#include "shearlab/levelset.hpp"
#include "shearlab/resolvent.hpp"
#include "shearlab/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace shear;

namespace {

struct Bands {
    CVector lo, d, up;
};

Bands random_bands(std::size_t n, SplitMix64& rng)
{
    Bands b;
    b.d = random_complex_vector(n, rng);
    b.lo = random_complex_vector(n - 1, rng);
    b.up = random_complex_vector(n - 1, rng);
    return b;
}

// one-sided Jacobi SVD, independent of the bidiagonalization used elsewhere
double jacobi_sigma_min(const Bands& b)
{
    const auto n = static_cast<Eigen::Index>(b.d.size());
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = b.d[static_cast<std::size_t>(i)];
        if (i + 1 < n) {
            A(i + 1, i) = b.lo[static_cast<std::size_t>(i)];
            A(i, i + 1) = b.up[static_cast<std::size_t>(i)];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues()(n - 1);
}

SigmaOptions no_fallback()
{
    SigmaOptions o;
    o.dense_fallback = false;
    return o;
}

} // namespace

TEST_CASE("sigma_min of a 1x1 matrix")
{
    const CVector d{cplx(2.0, 3.0)}, none;
    const auto r = inverse_iteration_sigma_min(none, d, none);
    CHECK(r.converged);
    CHECK(r.sigma == doctest::Approx(std::sqrt(13.0)).epsilon(1e-15));
}

TEST_CASE("sigma_min of the Neumann Laplacian is zero")
{
    const Grid1D g{0.0, 1.0, 50};
    const auto heat = assemble(profiles::poiseuille(DomainSpec::interval(0.0, 1.0)), g, 1.0, 0.0, 0.0);
    const auto r = smallest_singular_value(heat);
    CHECK(r.sigma <= 1e-10 * 4.0 / (g.h() * g.h()));
}

TEST_CASE("property: inverse iteration matches a Jacobi SVD oracle")
{
    SplitMix64 rng(314);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
        const std::size_t n = 1 + rng.next() % 200;
        const Bands b = random_bands(n, rng);
        const auto r = inverse_iteration_sigma_min(b.lo, b.d, b.up, no_fallback());
        REQUIRE(r.converged);
        const double ref = jacobi_sigma_min(b);
        worst = std::max(worst, std::abs(r.sigma - ref) / ref);
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("dense_sigma_min agrees with the oracle")
{
    SplitMix64 rng(2);
    const Bands b = random_bands(120, rng);
    CHECK(dense_sigma_min(b.lo, b.d, b.up) == doctest::Approx(jacobi_sigma_min(b)).epsilon(1e-10));
}

TEST_CASE("property: sigma_min scales with the operator")
{
    const Grid1D g{-1.0, 1.0, 400};
    const auto op = assemble(profiles::poiseuille(), g, 1e-3, 1.0, 0.2);
    const double base = smallest_singular_value(op).sigma;
    for (const double s : {2.0, 10.0}) {
        const double scaled = smallest_singular_value(op.scaled(s)).sigma;
        CHECK(std::abs(scaled - s * base) <= 1e-12 * s * base * 10);
    }
}

TEST_CASE("resolvent_profile examples")
{
    const double nu = 1e-3, k = 1.0;
    std::vector<double> lambdas;
    for (int i = -20; i <= 20; ++i) lambdas.push_back(0.4 * i);
    const auto pts = resolvent_profile(profiles::couette(), nu, k, lambdas);
    REQUIRE(pts.size() == lambdas.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].converged);
        CHECK(pts[i].lambda == lambdas[i]);
        // v is odd, so the scan is even in lambda
        const double mirror = pts[pts.size() - 1 - i].sigma_min;
        CHECK(std::abs(pts[i].sigma_min - mirror) <= 1e-10 * std::max(1.0, mirror));
    }
}

TEST_CASE("far from range(v), sigma_min is |k| dist(lambda, range) up to the diffusion norm")
{
    // |Im <(H - ik lambda) g, g>| >= |k| dist ||g||^2 from below, Weyl's
    // inequality with ||nu D^T D|| <= 4 nu / h^2 from above.
    const Grid1D g{-1.0, 1.0, 120};
    const double nu = 1e-2, k = 1.5;
    const double diff = 4.0 * nu / (g.h() * g.h());
    for (const auto& p : {profiles::poiseuille(), profiles::couette(DomainSpec::interval(-1.0, 1.0))}) {
        const auto op = assemble(p, g, nu, k, 0.0);
        double vmin = op.v_nodes().front(), vmax = vmin;
        for (double v : op.v_nodes()) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        for (const double lambda : {-40.0, -5.0, 6.0, 50.0}) {
            const double dist = lambda < vmin ? vmin - lambda : lambda - vmax;
            const double s = smallest_singular_value(op.with_lambda(lambda)).sigma;
            CHECK(s >= std::abs(k) * dist * (1 - 1e-12));
            CHECK(s <= std::abs(k) * dist + diff);
        }
    }
    // below min v = 0 for poiseuille: sigma >= |k||lambda| - sup|v|
    const auto pq = assemble(profiles::poiseuille(), g, nu, k, 0.0);
    for (const double lambda : {-3.0, -10.0})
        CHECK(smallest_singular_value(pq.with_lambda(lambda)).sigma >= std::abs(k * lambda) - 1.0);
}

TEST_CASE("pseudospectral_abscissa for couette")
{
    const auto a = pseudospectral_abscissa(profiles::couette(), 1e-3, 1.0);
    CHECK(a.grid_converged);
    CHECK(a.psi / std::cbrt(1e-3) >= 0.3);
    CHECK(a.psi / std::cbrt(1e-3) <= 3.0);
    CHECK(a.lambda_star >= a.grid.lo);
    CHECK(a.lambda_star <= a.grid.hi);
    // psi is the minimum of everything that was sampled
    for (const auto& [l, s] : a.scan) CHECK(s >= a.psi);
    const auto at_star = smallest_singular_value(assemble(profiles::couette(), a.grid, 1e-3, 1.0, a.lambda_star));
    CHECK(at_star.sigma == doctest::Approx(a.psi).epsilon(1e-10));

    const auto b = pseudospectral_abscissa(profiles::couette(), 1e-4, 1.0);
    CHECK(b.psi / a.psi == doctest::Approx(std::pow(10.0, -1.0 / 3.0)).epsilon(0.1));
}

TEST_CASE("truncation doubling leaves couette psi within 1%")
{
    PsiSearch s;
    s.check_truncation = true;
    const auto e = pseudospectral_abscissa(profiles::couette(), 1e-3, 1.0, s);
    REQUIRE(e.truncation_converged.has_value());
    CHECK(*e.truncation_converged);
    CHECK(std::abs(*e.psi_doubled_truncation - e.psi) <= 0.01 * e.psi);
}

TEST_CASE("psi on the axis is zero without shear")
{
    const auto e = pseudospectral_abscissa_on(profiles::poiseuille(), Grid1D{-1.0, 1.0, 100}, 1e-2, 0.0);
    CHECK(e.zero_on_axis);
    CHECK(e.psi == 0.0);
}

TEST_CASE("property: grid refinement converges psi")
{
    for (const auto& p : {profiles::poiseuille(), profiles::kolmogorov()}) {
        const auto w = default_window(p.domain(), 10.0);
        const auto e1 = pseudospectral_abscissa_on(p, Grid1D{w.lo, w.hi, 200}, 1e-3, 1.0);
        const auto e2 = pseudospectral_abscissa_on(p, Grid1D{w.lo, w.hi, 400}, 1e-3, 1.0);
        const auto e4 = pseudospectral_abscissa_on(p, Grid1D{w.lo, w.hi, 800}, 1e-3, 1.0);
        const double d1 = std::abs(e2.psi - e1.psi), d2 = std::abs(e4.psi - e2.psi);
        // first order or better: the change at least halves per refinement
        CHECK(d2 <= 0.5 * d1 + 1e-12 * e4.psi);
    }
}

TEST_CASE("property: psi is nondecreasing in nu")
{
    double prev = 0.0;
    for (const double nu : {1e-5, 1e-4, 1e-3, 1e-2}) {
        const auto e = pseudospectral_abscissa(profiles::poiseuille(), nu, 1.0);
        if (e.grid_converged) CHECK(e.psi >= prev);
        prev = e.psi;
    }
}

TEST_CASE("sigma_scan serial and parallel agree bitwise")
{
    const auto op = assemble(profiles::kolmogorov(), Grid1D{0.0, 2 * std::numbers::pi, 600}, 1e-3, 1.0, 0.0);
    std::vector<double> lambdas;
    for (int i = 0; i < 64; ++i) lambdas.push_back(-1.2 + 2.4 * i / 63.0);
    const int saved = max_threads();
    set_threads(4);
    const auto a = sigma_scan(op, lambdas, {}, Exec::Serial);
    const auto b = sigma_scan(op, lambdas, {}, Exec::Parallel);
    set_threads(saved);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].sigma == b[i].sigma);
}

TEST_CASE("resolvent certificate at the layer scale")
{
    const double nu = 1e-3, k = 1.0;
    const auto p = profiles::couette();
    const Grid1D g{-8.0, 8.0, 1600};
    const double delta = std::cbrt(nu);
    SplitMix64 rng(17);
    for (int s = 0; s < 20; ++s) {
        const auto v = random_complex_vector(g.n, rng);
        const auto rep = resolvent_certificate(p, g, nu, k, rng.uniform(-2.0, 2.0), delta, 1, v);
        CHECK(rep.all());
    }
    // smooth data concentrated on the level set
    CVector bump(g.n);
    for (std::size_t i = 0; i < g.n; ++i) bump[i] = std::exp(-0.5 * std::pow((g.node(i) - 0.3) / delta, 2));
    CHECK(resolvent_certificate(p, g, nu, k, 0.3, delta, 1, bump).all());

    // supported outside the neighbourhood: the inside integral vanishes
    CVector far(g.n);
    for (std::size_t i = 0; i < g.n; ++i) far[i] = std::exp(-0.5 * std::pow((g.node(i) - 5.0) / 0.3, 2));
    const auto rf = resolvent_certificate(p, g, nu, k, 0.0, delta, 1, far);
    CHECK(rf.ineq_inside);
    CHECK(rf.lhs_inside <= 1e-30);

    CHECK_THROWS_AS(resolvent_certificate(p, g, nu, k, 0.0, delta, 1, CVector(g.n)), Error);
}
