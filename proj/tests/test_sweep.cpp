// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "shearlab/errors.hpp"
#include "shearlab/exec.hpp"
#include "shearlab/rates.hpp"
#include "shearlab/sweep.hpp"

#include <cmath>

using namespace shear;

namespace {

RateTable power_law(double c, double a_nu, double a_k, const std::vector<double>& nus, const std::vector<double>& ks)
{
    RateTable t;
    for (double nu : nus)
        for (double k : ks) {
            RateRow r;
            r.nu = nu;
            r.k = k;
            r.psi = c * std::pow(nu, a_nu) * std::pow(std::abs(k), a_k);
            r.grid_converged = true;
            r.regime = classify_regime(nu, k);
            t.rows.push_back(r);
        }
    return t;
}

} // namespace

TEST_CASE("rate_target examples")
{
    CHECK(rate_target(1e-3, 1.0, 1) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(rate_target(1.0, 0.1, 1) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(rate_target(1.0, 0.1, 4) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(rate_target(0.5, 0.5, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rate_target(0.5, -0.5, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(rate_target(0.0, 1.0, 1), Error);
    CHECK_THROWS_AS(rate_target(1e-3, 0.0, 1), Error);
    CHECK_THROWS_AS(rate_target(1e-3, 1.0, 0), Error);
}

TEST_CASE("property: rate_target is continuous across the seam")
{
    for (int m = 1; m <= 6; ++m)
        for (double k = 0.01; k < 100.0; k *= 1.7) {
            const double below = rate_target(k * (1 - 1e-9), k, m);
            const double above = rate_target(k * (1 + 1e-9), k, m);
            CHECK(std::abs(above - below) <= 1e-8 * k);
            CHECK(rate_target(k, k, m) == doctest::Approx(k).epsilon(1e-14));
        }
}

TEST_CASE("classify_regime tie-break")
{
    CHECK(classify_regime(1.0, 1.0) == Regime::Enhanced);
    CHECK(classify_regime(1.0, -1.0) == Regime::Enhanced);
    CHECK(classify_regime(1.0, 0.5) == Regime::Taylor);
    CHECK(classify_regime(1e-3, 1.0) == Regime::Enhanced);
}

TEST_CASE("fit_scaling on exact power laws")
{
    const auto t = power_law(2.0, 1.0 / 3.0, 2.0 / 3.0, {1e-3, 1e-4, 1e-5}, {1.0, 2.0, 4.0});
    const auto f = fit_scaling(t, Regime::Enhanced);
    CHECK(f.exponent_nu == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(f.exponent_k == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.nu_identified);
    CHECK(f.k_identified);
    CHECK(f.rows == 9);

    const auto tay = power_law(1.0, -1.0, 2.0, {1.0, 2.0, 4.0}, {0.02, 0.05, 0.1, 0.2});
    const auto g = fit_scaling(tay, Regime::Taylor);
    CHECK(g.exponent_nu == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(g.exponent_k == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("fit_scaling degenerate designs")
{
    const auto one_nu = power_law(1.0, 0.5, 0.5, {1e-4}, {0.25, 0.5, 1.0, 2.0});
    const auto f = fit_scaling(one_nu, Regime::Enhanced);
    CHECK_FALSE(f.nu_identified);
    CHECK(std::isnan(f.exponent_nu));
    CHECK(f.exponent_k == doctest::Approx(0.5).epsilon(1e-10));

    const auto few = power_law(1.0, 0.5, 0.5, {1e-4, 1e-3, 1e-2}, {1.0});
    try {
        fit_scaling(few, Regime::Enhanced);
        FAIL("expected InsufficientRows");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientRows);
    }
    // rows of the other regime do not count
    CHECK_THROWS_AS(fit_scaling(power_law(1.0, 0.5, 0.5, {1e-4, 1e-3, 1e-2, 1e-1}, {1.0}), Regime::Taylor), Error);
}

TEST_CASE("psi_sweep rows, regimes and the lower-bound floor")
{
    const auto t = psi_sweep(profiles::poiseuille(), {1.0}, {0.02, 0.05, 0.1, 0.2});
    REQUIRE(t.rows.size() == 4);
    for (const auto& r : t.rows) {
        CHECK(r.regime == Regime::Taylor);
        CHECK(r.error.empty());
        CHECK(r.psi > 0.0);
        CHECK(std::isnan(r.semigroup_rate));
        // Taylor dispersion: the effective diffusivity of y^2 on [-1, 1] is
        // <phi^2> k^2 / nu with phi' = v - <v>, phi = (y^3 - y) / 3, so
        // <phi^2> = 8/945, well below the 0.05 floor used for enhanced rows.
        CHECK(r.grid_converged);
        CHECK(r.psi / rate_target(r.nu, r.k, 2) == doctest::Approx(8.0 / 945.0).epsilon(0.02));
    }

    const auto e = psi_sweep(profiles::couette(), {1e-2, 1e-3}, {1.0});
    REQUIRE(e.rows.size() == 2);
    CHECK(e.rows[0].nu == 1e-2);
    for (const auto& r : e.rows) {
        CHECK(r.regime == Regime::Enhanced);
        if (r.grid_converged) CHECK(r.psi >= 0.05 * rate_target(r.nu, r.k, 1));
    }

    const auto seam = psi_sweep(profiles::poiseuille(), {0.5}, {0.5});
    CHECK(seam.rows.at(0).regime == Regime::Enhanced);
}

TEST_CASE("psi_sweep with the semigroup column")
{
    SweepOptions o;
    o.with_semigroup = true;
    const auto t = psi_sweep(profiles::poiseuille(), {1e-3}, {1.0}, o);
    REQUIRE(t.rows.size() == 1);
    CHECK(std::isfinite(t.rows[0].semigroup_rate));
    CHECK(t.rows[0].semigroup_rate >= 0.98 * t.rows[0].psi);
}

TEST_CASE("psi_sweep records row errors instead of aborting")
{
    SweepOptions o;
    o.search.policy.n_cap = 2;   // below the 3-point minimum, so every row fails
    o.search.policy.n_min = 2;
    const auto t = psi_sweep(profiles::couette(), {1e-3, 1e-2}, {1.0}, o);
    REQUIRE(t.rows.size() == 2);
    for (const auto& r : t.rows) {
        CHECK_FALSE(r.error.empty());
        CHECK(std::isnan(r.psi));
    }
}

TEST_CASE("psi_sweep serial and parallel agree bitwise")
{
    SweepOptions s;
    s.exec = Exec::Serial;
    s.search.exec = Exec::Serial;
    const int saved = max_threads();
    set_threads(4);
    const auto a = psi_sweep(profiles::kolmogorov(), {1e-2, 1e-3}, {0.5, 1.0}, s);
    s.exec = Exec::Parallel;
    s.search.exec = Exec::Parallel;
    const auto b = psi_sweep(profiles::kolmogorov(), {1e-2, 1e-3}, {0.5, 1.0}, s);
    set_threads(saved);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].psi == b.rows[i].psi);
        CHECK(a.rows[i].lambda_star == b.rows[i].lambda_star);
    }
}

TEST_CASE("tensor_rate additivity and factor checks")
{
    const double nu = 1e-2, k = 1.0;
    const auto line = profiles::couette(DomainSpec::interval(-1.0, 1.0));
    const auto two = tensor_rate({line, line}, nu, k, [] {
        TensorOptions o;
        o.n_axis = 24;
        o.checkpoints = 2;
        return o;
    }());
    CHECK(two.sum_rate == doctest::Approx(2.0 * std::cbrt(nu)).epsilon(1e-14));

    const auto three = tensor_rate({line, profiles::poiseuille(), profiles::kolmogorov()}, nu, k);
    CHECK(three.sum_rate == rate_target(nu, k, 1) + rate_target(nu, k, 2) + rate_target(nu, k, 2));
    CHECK_FALSE(three.product_check.has_value());

    try {
        tensor_rate({line, profiles::taylor_couette()}, nu, k);
        FAIL("expected FactorCheckFailed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FactorCheckFailed);
    }
    TensorOptions big;
    big.n_axis = 300;
    try {
        tensor_rate({line, profiles::poiseuille()}, nu, k, big);
        FAIL("expected GridTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridTooLarge);
    }
}

TEST_CASE("tensor product check on a coarse grid")
{
    TensorOptions o;
    o.n_axis = 48;
    o.checkpoints = 4;
    const auto r = tensor_rate({profiles::couette(DomainSpec::interval(-1.0, 1.0)), profiles::poiseuille()}, 1e-2,
                               1.0, o);
    REQUIRE(r.product_check.has_value());
    const auto& pc = *r.product_check;
    CHECK(pc.times.size() == 5);
    CHECK(pc.norm_2d.front() == 1.0);
    CHECK(pc.rel_err <= 0.05);
    CHECK(pc.pass);
}

TEST_CASE("counterexample_scan")
{
    const auto one = counterexample_scan(1e-2, 1.0, {10.0});
    REQUIRE(one.size() == 1);
    CHECK(one[0].L == 10.0);
    CHECK(one[0].psi > 0.0);

    const auto rows = counterexample_scan(1e-2, 1.0, {5.0, 10.0, 20.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].psi < rows[0].psi);
    CHECK(rows[2].psi < rows[1].psi);

    CHECK_THROWS_AS(counterexample_scan(1e-2, 1.0, {10.0, 5.0}), Error);
    CHECK_THROWS_AS(counterexample_scan(profiles::couette(), 1e-2, 1.0, {10.0}), Error);
}
