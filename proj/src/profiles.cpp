// SPDX-License-Identifier: Apache-2.0
#include "shearlab/profiles.hpp"

#include "shearlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace shear {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OrderUnavailable: return "OrderUnavailable";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::FactorCheckFailed: return "FactorCheckFailed";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EdgeNotDecayed: return "EdgeNotDecayed";
    }
    return "Unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const DomainSpec& d)
{
    bool ok = d.a < d.b;
    switch (d.kind) {
    case DomainKind::FullLine: ok = ok && std::isinf(d.a) && std::isinf(d.b); break;
    case DomainKind::Interval: ok = ok && std::isfinite(d.a) && std::isfinite(d.b); break;
    case DomainKind::HalfLineLeft: ok = ok && std::isinf(d.a) && std::isfinite(d.b); break;
    case DomainKind::HalfLineRight: ok = ok && std::isfinite(d.a) && std::isinf(d.b); break;
    }
    require(ok, ErrorCode::InvalidArgument, "inconsistent domain specification");
}

// Derivatives of tanh as polynomials in t = tanh(y): P_{j+1}(t) = P_j'(t) (1 - t^2).
std::vector<std::vector<double>> tanh_derivative_polys(int max_order)
{
    std::vector<std::vector<double>> polys{{0.0, 1.0}};
    for (int j = 0; j < max_order; ++j) {
        const auto& p = polys.back();
        std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
        for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];
        std::vector<double> next(dp.size() + 2, 0.0);
        for (std::size_t i = 0; i < dp.size(); ++i) {
            next[i] += dp[i];
            next[i + 2] -= dp[i];
        }
        polys.push_back(std::move(next));
    }
    return polys;
}

double horner(const std::vector<double>& c, double x)
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// j-th derivative of sum_i c_i y^i.
double polynomial_derivative(const std::vector<double>& c, double y, int j)
{
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(j);) {
        double falling = 1.0;
        for (int r = 0; r < j; ++r) falling *= static_cast<double>(i - static_cast<std::size_t>(r));
        acc = acc * y + falling * c[i];
    }
    return acc;
}

} // namespace

DomainSpec DomainSpec::full_line() { return {DomainKind::FullLine, -kInf, kInf}; }
DomainSpec DomainSpec::half_line_left(double b)
{
    DomainSpec d{DomainKind::HalfLineLeft, -kInf, b};
    validate(d);
    return d;
}
DomainSpec DomainSpec::half_line_right(double a)
{
    DomainSpec d{DomainKind::HalfLineRight, a, kInf};
    validate(d);
    return d;
}
DomainSpec DomainSpec::interval(double a, double b)
{
    DomainSpec d{DomainKind::Interval, a, b};
    validate(d);
    return d;
}

std::string to_string(DomainKind kind)
{
    switch (kind) {
    case DomainKind::FullLine: return "FullLine";
    case DomainKind::HalfLineLeft: return "HalfLineLeft";
    case DomainKind::HalfLineRight: return "HalfLineRight";
    case DomainKind::Interval: return "Interval";
    }
    return "?";
}

std::string to_string(Trend t)
{
    switch (t) {
    case Trend::Increasing: return "Increasing";
    case Trend::Flat: return "Flat";
    case Trend::Vanishing: return "Vanishing";
    }
    return "?";
}

ShearProfile::ShearProfile(std::string name, DerivativeFn deriv, int m, int max_order, DomainSpec domain,
                           std::optional<double> c0_hint)
    : name_(std::move(name)), deriv_(std::move(deriv)), m_(m), max_order_(max_order), domain_(domain),
      c0_hint_(c0_hint)
{
    validate(domain_);
    require(m_ >= 1, ErrorCode::InvalidArgument, "non-degeneracy order must be >= 1");
    require(max_order_ >= m_, ErrorCode::InvalidArgument, "derivatives must be available up to order m");
    require(!c0_hint_ || *c0_hint_ > 0.0, ErrorCode::InvalidArgument, "c0_hint must be positive");
}

double ShearProfile::eval(double y, int order) const
{
    if (!domain_.contains(y)) {
        std::ostringstream os;
        os << "y=" << y << " outside domain of " << name_;
        fail(ErrorCode::OutOfDomain, os.str());
    }
    if (order < 0 || order > max_order_) {
        fail(ErrorCode::OrderUnavailable,
             name_ + " provides derivatives up to order " + std::to_string(max_order_));
    }
    return deriv_(y, order);
}

double eval_profile(const ShearProfile& p, double y, int order) { return p.eval(y, order); }

namespace profiles {

ShearProfile couette(DomainSpec domain)
{
    auto d = [](double y, int j) { return j == 0 ? y : (j == 1 ? 1.0 : 0.0); };
    return ShearProfile("couette", d, 1, 8, domain, 1.0);
}

ShearProfile poiseuille(DomainSpec domain)
{
    auto d = [](double y, int j) {
        switch (j) {
        case 0: return y * y;
        case 1: return 2.0 * y;
        case 2: return 2.0;
        default: return 0.0;
        }
    };
    std::optional<double> c0;
    if (!domain.bounded()) c0 = 1.0;
    return ShearProfile("poiseuille", d, 2, 8, domain, c0);
}

ShearProfile kolmogorov(DomainSpec domain)
{
    auto d = [](double y, int j) {
        switch (j % 4) {
        case 0: return std::sin(y);
        case 1: return std::cos(y);
        case 2: return -std::sin(y);
        default: return -std::cos(y);
        }
    };
    return ShearProfile("kolmogorov", d, 2, 16, domain);
}

ShearProfile monomial(int degree, DomainSpec domain)
{
    require(degree >= 1, ErrorCode::InvalidArgument, "monomial degree must be >= 1");
    std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
    c.back() = 1.0;
    auto d = [c](double y, int j) { return polynomial_derivative(c, y, j); };
    std::optional<double> c0;
    if (!domain.bounded()) c0 = 1.0;
    return ShearProfile("monomial" + std::to_string(degree), d, degree, degree + 2, domain, c0);
}

ShearProfile taylor_couette(double inner_radius)
{
    // v = y^{-2}, v^{(j)} = (-1)^j (j+1)! y^{-(j+2)}
    auto d = [](double y, int j) {
        double fact = 1.0;
        for (int r = 2; r <= j + 1; ++r) fact *= r;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        return sign * fact * std::pow(y, -(j + 2));
    };
    return ShearProfile("taylor_couette", d, 1, 12, DomainSpec::half_line_right(inner_radius));
}

ShearProfile tanh_profile()
{
    auto polys = tanh_derivative_polys(6);
    auto d = [polys](double y, int j) { return horner(polys[static_cast<std::size_t>(j)], std::tanh(y)); };
    return ShearProfile("tanh", d, 1, 6, DomainSpec::full_line());
}

ShearProfile polynomial(std::vector<double> coeffs, int m, DomainSpec domain, std::optional<double> c0_hint)
{
    require(!coeffs.empty(), ErrorCode::InvalidArgument, "polynomial needs coefficients");
    const int max_order = std::max<int>(m, static_cast<int>(coeffs.size()) + 1);
    auto d = [coeffs](double y, int j) { return polynomial_derivative(coeffs, y, j); };
    return ShearProfile("polynomial", d, m, max_order, domain, c0_hint);
}

namespace {

DomainSpec domain_from(const ProfileParams& p, DomainSpec fallback)
{
    if (!p.domain) {
        if (p.lo && p.hi) return DomainSpec::interval(*p.lo, *p.hi);
        return fallback;
    }
    const auto& kind = *p.domain;
    if (kind == "R" || kind == "full_line") return DomainSpec::full_line();
    if (kind == "interval") {
        require(p.lo && p.hi, ErrorCode::ConfigError, "interval domain needs lo and hi");
        return DomainSpec::interval(*p.lo, *p.hi);
    }
    if (kind == "half_right") {
        require(p.lo.has_value(), ErrorCode::ConfigError, "half_right domain needs lo");
        return DomainSpec::half_line_right(*p.lo);
    }
    if (kind == "half_left") {
        require(p.hi.has_value(), ErrorCode::ConfigError, "half_left domain needs hi");
        return DomainSpec::half_line_left(*p.hi);
    }
    fail(ErrorCode::ConfigError, "unknown domain kind '" + kind + "'");
}

} // namespace

ShearProfile by_name(const std::string& name, const ProfileParams& params)
{
    if (name == "couette") return couette(domain_from(params, DomainSpec::full_line()));
    if (name == "poiseuille") return poiseuille(domain_from(params, DomainSpec::interval(-1.0, 1.0)));
    if (name == "kolmogorov")
        return kolmogorov(domain_from(params, DomainSpec::interval(0.0, 2.0 * std::numbers::pi)));
    if (name == "monomial") {
        require(params.degree.has_value(), ErrorCode::ConfigError, "monomial needs 'degree'");
        return monomial(*params.degree, domain_from(params, DomainSpec::full_line()));
    }
    if (name == "taylor_couette") return taylor_couette(params.lo.value_or(1.0));
    if (name == "tanh") return tanh_profile();
    if (name == "polynomial") {
        require(!params.coeffs.empty() && params.m.has_value(), ErrorCode::ConfigError,
                "polynomial needs 'coeffs' and 'm'");
        return polynomial(params.coeffs, *params.m, domain_from(params, DomainSpec::full_line()),
                          params.c0_hint);
    }
    fail(ErrorCode::ConfigError, "unknown profile '" + name + "'");
}

} // namespace profiles

NondegeneracyReport check_nondegeneracy(const ShearProfile& p, std::span<const double> grid,
                                        std::optional<int> order, double tolerance)
{
    require(!grid.empty(), ErrorCode::EmptyGrid, "non-degeneracy check needs grid points");
    NondegeneracyReport r;
    r.order = order.value_or(p.m());
    require(r.order >= 1 && r.order <= p.max_order(), ErrorCode::OrderUnavailable,
            "requested order exceeds available derivatives");
    r.min_sum = std::numeric_limits<double>::infinity();
    for (double y : grid) {
        double s = 0.0;
        for (int j = 1; j <= r.order; ++j) s += std::abs(p.eval(y, j));
        if (s < r.min_sum) {
            r.min_sum = s;
            r.witness_y = y;
        }
    }
    r.pass = r.min_sum > tolerance;
    return r;
}

InfinityReport check_infinity_nondegeneracy(const ShearProfile& p, std::span<const double> probe_radii,
                                            double tolerance)
{
    InfinityReport r;
    const auto& d = p.domain();
    if (d.bounded()) {
        r.vacuous = true;
        r.pass = true;
        r.trend = Trend::Flat;
        return r;
    }
    require(!probe_radii.empty(), ErrorCode::EmptyGrid, "need at least one probe radius");
    require(std::is_sorted(probe_radii.begin(), probe_radii.end()), ErrorCode::InvalidArgument,
            "probe radii must be increasing");

    for (double radius : probe_radii) {
        double shell_min = std::numeric_limits<double>::infinity();
        if (d.unbounded_right()) shell_min = std::min(shell_min, std::abs(p.eval(radius, 1)));
        if (d.unbounded_left()) shell_min = std::min(shell_min, std::abs(p.eval(-radius, 1)));
        r.shell_minima.push_back(shell_min);
    }

    r.liminf_estimate = r.shell_minima.back();
    const double first = r.shell_minima.front();
    if (r.shell_minima.size() == 1) {
        r.trend = Trend::Flat;
    } else if (r.liminf_estimate < 0.5 * first) {
        r.trend = Trend::Vanishing;
    } else if (r.liminf_estimate > 1.5 * first) {
        r.trend = Trend::Increasing;
    } else {
        r.trend = Trend::Flat;
    }

    const double floor = p.c0_hint().value_or(tolerance);
    const bool above = p.c0_hint() ? r.liminf_estimate >= floor : r.liminf_estimate > floor;
    r.pass = above && r.trend != Trend::Vanishing;
    return r;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points)
{
    require(points >= 2, ErrorCode::InvalidArgument, "uniform grid needs >= 2 points");
    std::vector<double> g(points);
    const double h = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo + static_cast<double>(i) * h;
    g.back() = hi;
    return g;
}

} // namespace shear
