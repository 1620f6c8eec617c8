// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "shearlab/errors.hpp"
#include "shearlab/operator.hpp"
#include "shearlab/rng.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace shear;
using std::numbers::pi;

namespace {

// Dense H built straight from the stencil: the assembly oracle.
Eigen::MatrixXcd dense_operator(const ShearProfile& p, const Grid1D& g, double nu, double k, double lambda,
                                bool dirichlet = false)
{
    const auto n = static_cast<Eigen::Index>(g.n);
    const double h = g.h();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = g.lo + (static_cast<double>(i) + 0.5) * h;
        int neighbours = 0;
        if (i > 0) {
            H(i, i - 1) = -nu / (h * h);
            ++neighbours;
        }
        if (i + 1 < n) {
            H(i, i + 1) = -nu / (h * h);
            ++neighbours;
        }
        // a Dirichlet ghost mirrors with a sign flip, a Neumann ghost cancels
        const double stencil = dirichlet ? 2.0 : static_cast<double>(neighbours);
        H(i, i) = cplx(stencil * nu / (h * h), k * (p(y) - lambda));
    }
    return H;
}

Eigen::VectorXcd as_eigen(const CVector& v) { return Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size()); }

CVector smooth_bump(const Grid1D& g, double c, double w, SplitMix64& rng)
{
    const cplx phase(rng.normal(), rng.normal());
    CVector out(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double y = g.node(i);
        out[i] = phase * std::exp(-0.5 * ((y - c) / w) * ((y - c) / w));
    }
    return out;
}

} // namespace

TEST_CASE("cell-centred grid")
{
    const Grid1D g{-1.0, 1.0, 4};
    CHECK(g.h() == 0.5);
    CHECK(g.node(0) == -0.75);
    CHECK(g.node(3) == 0.75);
    CHECK(g.nodes().size() == 4);
    CHECK(g.refined().n == 8);
}

TEST_CASE("truncate_domain examples")
{
    const auto q = truncate_domain(profiles::poiseuille(), 1e-3, 1.0).grid;
    CHECK(q.lo == -1.0);
    CHECK(q.hi == 1.0);

    TruncationPolicy pol;
    pol.margin_factor = 8.0;
    const auto c = truncate_domain(profiles::couette(), 1e-3, 1.0, pol);
    CHECK(c.grid.lo == -c.grid.hi);
    CHECK(c.grid.hi >= 8.0);
    CHECK(c.cut == c.grid.hi);
    // ten points per boundary layer
    CHECK(c.grid.h() <= 0.1 * layer_width(1e-3, 1.0, 1) * (1 + 1e-12));

    pol.right_cut = 40.0;
    const auto tc = truncate_domain(profiles::taylor_couette(), 1e-3, 1.0, pol).grid;
    CHECK(tc.lo == 1.0);
    CHECK(tc.hi == 40.0);

    const auto d = doubled_truncation(profiles::couette(), 1e-3, 1.0);
    CHECK(d.grid.hi == doctest::Approx(2 * c.grid.hi));
    CHECK(d.grid.h() == doctest::Approx(c.grid.h()).epsilon(1e-12));

    TruncationPolicy capped;
    capped.n_cap = 500;
    const auto cc = truncate_domain(profiles::couette(), 1e-6, 1.0, capped);
    CHECK(cc.grid.n == 500);
    CHECK(cc.capped);
}

TEST_CASE("assemble examples")
{
    const Grid1D g{-3.0, 3.0, 50};
    const auto heat = assemble(profiles::poiseuille(DomainSpec::full_line()), g, 0.7, 0.0, 0.0);
    const CVector ones(g.n, cplx(1.0, 0.0));
    for (const auto& x : heat.apply(ones)) CHECK(std::abs(x) < 1e-13);

    const auto c = assemble(profiles::couette(), g, 1e-3, 1.0, 0.0);
    const auto y = c.apply(ones);
    for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(std::abs(y[i].real()) < 1e-13);
        CHECK(y[i].imag() == doctest::Approx(g.node(i)).epsilon(1e-14));
    }
}

TEST_CASE("assembly matches the dense oracle entrywise")
{
    const Grid1D g{0.0, 2 * pi, 200};
    for (const bool dirichlet : {false, true}) {
        const auto op = assemble(profiles::kolmogorov(), g, 3e-3, 1.7, 0.2,
                                 dirichlet ? Closure::Dirichlet : Closure::Neumann);
        const auto D = dense_operator(profiles::kolmogorov(), g, 3e-3, 1.7, 0.2, dirichlet);
        for (std::size_t i = 0; i < g.n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            CHECK(std::abs(op.diag()[i] - D(ii, ii)) <= 1e-14 * std::abs(D(ii, ii)));
            if (i + 1 < g.n) CHECK(std::abs(op.off()[i] - D(ii, ii + 1).real()) <= 1e-14 * std::abs(op.off()[i]));
        }
    }
}

TEST_CASE("apply examples")
{
    const Grid1D g{-1.0, 1.0, 100};
    const auto op = assemble(profiles::poiseuille(), g, 1e-2, 2.0, 0.3);
    const CVector zero(g.n);
    for (const auto& x : op.apply(zero)) CHECK(x == cplx(0.0, 0.0));

    const auto D = dense_operator(profiles::poiseuille(), g, 1e-2, 2.0, 0.3);
    CVector e0(g.n);
    e0[0] = 1.0;
    const auto col = op.apply(e0);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(col[i] == D(static_cast<Eigen::Index>(i), 0));

    SplitMix64 rng(3);
    const auto v = random_complex_vector(g.n, rng);
    const Eigen::VectorXcd ref = D * as_eigen(v);
    const Eigen::VectorXcd got = as_eigen(op.apply(v));
    CHECK((got - ref).norm() <= 1e-14 * ref.norm());

    CHECK_THROWS_AS(op.apply(CVector(g.n + 1)), Error);
}

TEST_CASE("adjoint apply is the conjugate transpose")
{
    const Grid1D g{-1.0, 1.0, 64};
    const auto op = assemble(profiles::poiseuille(), g, 1e-2, 2.0, 0.3);
    SplitMix64 rng(8);
    const auto f = random_complex_vector(g.n, rng);
    const auto u = random_complex_vector(g.n, rng);
    CVector hu(g.n), hf(g.n);
    op.apply(u, hu);
    op.apply_adjoint(f, hf);
    const cplx lhs = inner(hu, f, g.h());
    const cplx rhs = inner(u, hf, g.h());
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::abs(lhs));
}

TEST_CASE("numerical_range_check examples")
{
    const Grid1D g{-1.0, 1.0, 101};
    const auto heat = assemble(profiles::poiseuille(), g, 1e-2, 0.0, 0.0);
    const CVector ones(g.n, cplx(1.0, 0.0));
    const auto r0 = numerical_range_check(heat, ones);
    CHECK(r0.re_residual == 0.0);
    CHECK(r0.im_residual == 0.0);

    SplitMix64 rng(11);
    const Grid1D gc{-8.0, 8.0, 1600};
    const auto c = assemble(profiles::couette(), gc, 1e-3, 1.0, 0.0);
    const auto r1 = numerical_range_check(c, random_complex_vector(gc.n, rng));
    CHECK(r1.re_residual <= 1e-12);
    CHECK(r1.im_residual <= 1e-12);

    // Neumann eigenvector cos(pi j (y - lo) / L) has eigenvalue 4 nu/h^2 sin^2(pi j / 2n)
    const int j = 3;
    CVector e(g.n);
    for (std::size_t i = 0; i < g.n; ++i) e[i] = std::cos(pi * j * (g.node(i) - g.lo) / (g.hi - g.lo));
    const auto r2 = numerical_range_check(heat, e);
    CHECK(r2.re_residual <= 1e-12);
    const double h = g.h();
    const double mu = 4.0 * 1e-2 / (h * h) * std::pow(std::sin(pi * j / (2.0 * static_cast<double>(g.n))), 2);
    const double rq = inner(heat.apply(e), e, h).real() / std::pow(norm(e, h), 2);
    CHECK(std::abs(rq - mu) <= 1e-12 * std::max(1.0, mu));

    CHECK_THROWS_AS(numerical_range_check(heat, CVector(g.n)), Error);
}

TEST_CASE("property: discrete accretivity and numerical range on every built-in")
{
    struct Case {
        ShearProfile p;
        Grid1D g;
    };
    const std::vector<Case> cases{{profiles::couette(), {-8.0, 8.0, 800}},
                                  {profiles::poiseuille(), {-1.0, 1.0, 400}},
                                  {profiles::poiseuille(DomainSpec::full_line()), {-3.0, 3.0, 400}},
                                  {profiles::kolmogorov(), {0.0, 2 * pi, 400}},
                                  {profiles::monomial(3), {-2.0, 2.0, 400}},
                                  {profiles::taylor_couette(), {1.0, 20.0, 400}},
                                  {profiles::tanh_profile(), {-5.0, 5.0, 400}}};
    const std::vector<std::array<double, 3>> params{{1e-3, 1.0, 0.0}, {1.0, 0.1, 0.5}, {1e-5, 4.0, -0.3}};
    SplitMix64 rng(2024);
    for (const auto& c : cases) {
        for (const auto& [nu, k, lambda] : params) {
            const auto op = assemble(c.p, c.g, nu, k, lambda);
            for (int s = 0; s < 1000 / static_cast<int>(params.size()) + 1; ++s) {
                const auto v = random_complex_vector(c.g.n, rng);
                const double n2 = std::pow(norm(v, c.g.h()), 2);
                REQUIRE(inner(op.apply(v), v, c.g.h()).real() >= -1e-12 * n2);
                const auto r = numerical_range_check(op, v);
                REQUIRE(r.re_residual <= 1e-12);
                REQUIRE(r.im_residual <= 1e-12);
            }
        }
    }
}

TEST_CASE("property: apply is linear")
{
    const Grid1D g{0.0, 2 * pi, 300};
    const auto op = assemble(profiles::kolmogorov(), g, 1e-3, 1.0, 0.1);
    SplitMix64 rng(5);
    for (int s = 0; s < 50; ++s) {
        const auto a = random_complex_vector(g.n, rng);
        const auto b = random_complex_vector(g.n, rng);
        const cplx al = rng.complex_normal(), be = rng.complex_normal();
        CVector comb(g.n);
        for (std::size_t i = 0; i < g.n; ++i) comb[i] = al * a[i] + be * b[i];
        const auto lhs = op.apply(comb);
        const auto ha = op.apply(a), hb = op.apply(b);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            err = std::max(err, std::abs(lhs[i] - (al * ha[i] + be * hb[i])));
            scale = std::max(scale, std::abs(lhs[i]));
        }
        CHECK(err <= 1e-14 * scale * 10);   // a few roundings per entry
    }
}

TEST_CASE("interpolation inequality examples")
{
    const Grid1D g{-10.0, 10.0, 4000};
    CVector gauss(g.n);
    for (std::size_t i = 0; i < g.n; ++i) gauss[i] = std::exp(-0.5 * g.node(i) * g.node(i));
    // |g|_inf^2 = 1 and 2 |g| |g'| = sqrt(2 pi)
    const double r = interpolation_inequality_check(gauss, g);
    CHECK(r == doctest::Approx(1.0 / std::sqrt(2 * pi)).epsilon(1e-3));

    for (const double sigma : {0.3, 0.7, 1.5}) {
        CVector s(g.n);
        for (std::size_t i = 0; i < g.n; ++i) s[i] = std::exp(-0.5 * std::pow(g.node(i) / sigma, 2));
        CHECK(interpolation_inequality_check(s, g) == doctest::Approx(r).epsilon(2e-3));
    }

    CVector wide(g.n);
    for (std::size_t i = 0; i < g.n; ++i) wide[i] = std::exp(-0.5 * std::pow(g.node(i) / 5.0, 2));
    try {
        interpolation_inequality_check(wide, g);
        FAIL("expected EdgeNotDecayed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EdgeNotDecayed);
    }
}

TEST_CASE("property: interpolation ratio on random smooth bumps")
{
    const Grid1D g{-10.0, 10.0, 2000};
    SplitMix64 rng(99);
    for (int s = 0; s < 1000; ++s) {
        const auto a = smooth_bump(g, rng.uniform(-5.0, 5.0), rng.uniform(0.1, 0.8), rng);
        const auto b = smooth_bump(g, rng.uniform(-5.0, 5.0), rng.uniform(0.1, 0.8), rng);
        CVector v(g.n);
        for (std::size_t i = 0; i < g.n; ++i) v[i] = a[i] + b[i];
        REQUIRE(interpolation_inequality_check(v, g) <= 1.0 + 10.0 * g.h());
    }
}

TEST_CASE("operator json dump")
{
    const auto op = assemble(profiles::couette(), Grid1D{-1.0, 1.0, 5}, 0.1, 1.0, 0.0);
    const auto j = nlohmann::json::parse(op.to_json());
    CHECK(j.contains("grid"));
    CHECK(j.at("nu").get<double>() == 0.1);
}
