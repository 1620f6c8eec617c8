// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "shearlab/errors.hpp"
#include "shearlab/profiles.hpp"
#include "shearlab/rng.hpp"

#include <cmath>
#include <numbers>

using namespace shear;

namespace {

std::vector<ShearProfile> builtins()
{
    return {profiles::couette(),
            profiles::poiseuille(),
            profiles::poiseuille(DomainSpec::full_line()),
            profiles::kolmogorov(),
            profiles::monomial(3),
            profiles::monomial(4, DomainSpec::interval(-1.0, 1.0)),
            profiles::taylor_couette(),
            profiles::tanh_profile(),
            profiles::polynomial({0.5, 1.0, 0.0, 2.0}, 1, DomainSpec::interval(-2.0, 2.0))};
}

// sample window inside the domain
std::pair<double, double> sample_range(const DomainSpec& d)
{
    const double lo = std::isfinite(d.a) ? d.a : (std::isfinite(d.b) ? d.b - 10.0 : -10.0);
    const double hi = std::isfinite(d.b) ? d.b : lo + (std::isfinite(d.a) ? 10.0 : 20.0);
    return {lo, hi};
}

} // namespace

TEST_CASE("eval_profile on closed forms")
{
    CHECK(eval_profile(profiles::couette(), 0.3, 1) == 1.0);
    CHECK(eval_profile(profiles::poiseuille(), 2.0 - 1.0, 0) == 1.0);
    CHECK(eval_profile(profiles::poiseuille(DomainSpec::full_line()), 2.0, 0) == 4.0);
    CHECK(eval_profile(profiles::taylor_couette(), 2.0, 1) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(eval_profile(profiles::kolmogorov(), std::numbers::pi / 2, 0) == doctest::Approx(1.0));
}

TEST_CASE("eval_profile errors")
{
    CHECK_THROWS_AS(eval_profile(profiles::poiseuille(), 2.0, 0), Error);
    CHECK_THROWS_AS(eval_profile(profiles::taylor_couette(), 0.5, 0), Error);
    const auto p = profiles::couette();
    try {
        eval_profile(p, 0.0, p.max_order() + 1);
        FAIL("expected OrderUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OrderUnavailable);
    }
    try {
        eval_profile(profiles::poiseuille(), 1.5, 0);
        FAIL("expected OutOfDomain");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfDomain);
    }
}

TEST_CASE("by_name resolves the built-ins and rejects unknown names")
{
    CHECK(profiles::by_name("couette").m() == 1);
    CHECK(profiles::by_name("poiseuille").m() == 2);
    CHECK(profiles::by_name("kolmogorov").m() == 2);
    profiles::ProfileParams q;
    q.degree = 5;
    CHECK(profiles::by_name("monomial", q).m() == 5);
    CHECK(profiles::by_name("taylor_couette").domain().kind == DomainKind::HalfLineRight);
    CHECK(profiles::by_name("tanh").domain().kind == DomainKind::FullLine);
    try {
        profiles::by_name("hagen");
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("domain invariants")
{
    CHECK(DomainSpec::full_line().unbounded_left());
    CHECK(DomainSpec::full_line().unbounded_right());
    CHECK(DomainSpec::interval(-1, 1).bounded());
    CHECK(DomainSpec::half_line_right(1.0).a == 1.0);
    CHECK(std::isinf(DomainSpec::half_line_right(1.0).b));
    CHECK(std::isinf(DomainSpec::half_line_left(0.0).a));
    CHECK_THROWS_AS(DomainSpec::interval(1.0, -1.0), Error);
}

TEST_CASE("property: closed-form derivatives match central differences")
{
    SplitMix64 rng(101);
    const double h = 1e-5;
    for (const auto& p : builtins()) {
        auto [lo, hi] = sample_range(p.domain());
        lo += 2 * h;
        hi -= 2 * h;
        // taylor_couette is stiff next to the inner radius; keep the check relative
        for (int s = 0; s < 10000; ++s) {
            const double y = rng.uniform(lo, hi);
            for (int j = 1; j <= p.max_order(); ++j) {
                const double fd = (p.derivative(y + h, j - 1) - p.derivative(y - h, j - 1)) / (2 * h);
                const double ex = p.derivative(y, j);
                const double scale = std::max({1.0, std::abs(ex), std::abs(p.derivative(y, j - 1))});
                if (std::abs(fd - ex) > 1e-6 * scale) {
                    FAIL_CHECK(p.name() << " order " << j << " at y=" << y << ": fd " << fd << " vs " << ex);
                    break;
                }
            }
        }
    }
}

TEST_CASE("check_nondegeneracy examples")
{
    const auto grid = uniform_grid(-1.0, 1.0, 1001);
    const auto pois = profiles::poiseuille();
    const auto r1 = check_nondegeneracy(pois, grid, 1);
    CHECK_FALSE(r1.pass);
    CHECK(std::abs(r1.witness_y) < 1e-12);
    const auto r2 = check_nondegeneracy(pois, grid, 2);
    CHECK(r2.pass);
    CHECK(r2.min_sum >= 2.0);

    const auto kol = profiles::kolmogorov();
    const auto rk = check_nondegeneracy(kol, uniform_grid(0.0, 2 * std::numbers::pi, 4001));
    CHECK(rk.pass);
    CHECK(rk.min_sum == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(check_nondegeneracy(kol, std::vector<double>{}), Error);
}

TEST_CASE("property: monomial y^p is non-degenerate exactly at order p")
{
    const auto grid = uniform_grid(-1.0, 1.0, 2001);
    for (int deg = 1; deg <= 6; ++deg) {
        const auto p = profiles::monomial(deg, DomainSpec::interval(-1.0, 1.0));
        CHECK(check_nondegeneracy(p, grid, deg).pass);
        for (int order = 1; order < deg; ++order) CHECK_FALSE(check_nondegeneracy(p, grid, order).pass);
    }
}

TEST_CASE("check_infinity_nondegeneracy examples")
{
    const std::vector<double> radii{10.0, 20.0, 40.0};
    const auto c = check_infinity_nondegeneracy(profiles::couette(), radii);
    CHECK(c.pass);
    CHECK(c.liminf_estimate == 1.0);

    const auto tc = check_infinity_nondegeneracy(profiles::taylor_couette(), radii);
    CHECK_FALSE(tc.pass);
    CHECK(tc.trend == Trend::Vanishing);

    const auto th = check_infinity_nondegeneracy(profiles::tanh_profile(), radii);
    CHECK_FALSE(th.pass);
    CHECK(th.trend == Trend::Vanishing);

    const auto bounded = check_infinity_nondegeneracy(profiles::poiseuille(), radii);
    CHECK(bounded.pass);
    CHECK(bounded.vacuous);
    CHECK(bounded.trend == Trend::Flat);
}

TEST_CASE("property: infinity check separates the unbounded built-ins")
{
    const std::vector<double> radii{10.0, 20.0, 40.0};
    for (const auto& p : {profiles::couette(), profiles::poiseuille(DomainSpec::full_line()), profiles::monomial(1),
                          profiles::monomial(3), profiles::monomial(5)})
        CHECK_MESSAGE(check_infinity_nondegeneracy(p, radii).pass, p.name());
    for (const auto& p : {profiles::taylor_couette(), profiles::tanh_profile()})
        CHECK_MESSAGE(!check_infinity_nondegeneracy(p, radii).pass, p.name());
}
