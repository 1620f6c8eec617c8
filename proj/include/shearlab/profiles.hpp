// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shear {

enum class DomainKind { FullLine, HalfLineLeft, HalfLineRight, Interval };

/// Cross-section domain. Infinite endpoints are stored as +-infinity.
struct DomainSpec {
    DomainKind kind = DomainKind::FullLine;
    double a = -std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();

    static DomainSpec full_line();
    static DomainSpec half_line_left(double b);
    static DomainSpec half_line_right(double a);
    static DomainSpec interval(double a, double b);

    bool contains(double y) const { return y >= a && y <= b; }
    bool bounded() const { return kind == DomainKind::Interval; }
    bool unbounded_left() const { return kind == DomainKind::FullLine || kind == DomainKind::HalfLineLeft; }
    bool unbounded_right() const { return kind == DomainKind::FullLine || kind == DomainKind::HalfLineRight; }
};

std::string to_string(DomainKind kind);

/// Closed-form derivative table: deriv(y, j) = v^{(j)}(y) for j <= max_order.
using DerivativeFn = std::function<double(double, int)>;

/// A shear profile v on a one-dimensional cross-section together with its
/// non-degeneracy order m and, for unbounded domains, a claimed lower bound
/// c0 on liminf |v'| at infinity.
///
/// Immutable after construction.
class ShearProfile {
public:
    ShearProfile(std::string name, DerivativeFn deriv, int m, int max_order, DomainSpec domain,
                 std::optional<double> c0_hint = std::nullopt);

    const std::string& name() const { return name_; }
    int m() const { return m_; }
    int max_order() const { return max_order_; }
    const DomainSpec& domain() const { return domain_; }
    std::optional<double> c0_hint() const { return c0_hint_; }

    /// v^{(order)}(y). Throws OutOfDomain or OrderUnavailable.
    double eval(double y, int order = 0) const;

    /// Unchecked evaluation for hot loops whose grids are already in the domain.
    double operator()(double y) const { return deriv_(y, 0); }
    double derivative(double y, int order) const { return deriv_(y, order); }

private:
    std::string name_;
    DerivativeFn deriv_;
    int m_;
    int max_order_;
    DomainSpec domain_;
    std::optional<double> c0_hint_;
};

double eval_profile(const ShearProfile& p, double y, int order);

namespace profiles {

ShearProfile couette(DomainSpec domain = DomainSpec::full_line());
ShearProfile poiseuille(DomainSpec domain = DomainSpec::interval(-1.0, 1.0));
ShearProfile kolmogorov(DomainSpec domain = DomainSpec::interval(0.0, 2.0 * 3.14159265358979323846));
ShearProfile monomial(int degree, DomainSpec domain = DomainSpec::full_line());
ShearProfile taylor_couette(double inner_radius = 1.0);
ShearProfile tanh_profile();

/// v(y) = sum_i coeffs[i] y^i. The order m is the smallest order for which
/// the non-degeneracy sum is bounded away from zero on the domain; it must be
/// supplied because it is not derivable symbolically in general.
ShearProfile polynomial(std::vector<double> coeffs, int m, DomainSpec domain,
                        std::optional<double> c0_hint = std::nullopt);

/// Look up a built-in by identifier; unknown names throw ConfigError.
struct ProfileParams {
    std::optional<int> degree;
    std::optional<double> lo;
    std::optional<double> hi;
    std::optional<std::string> domain; // "R", "interval", "half_right", "half_left"
    std::vector<double> coeffs;
    std::optional<int> m;
    std::optional<double> c0_hint;
};
ShearProfile by_name(const std::string& name, const ProfileParams& params = {});

} // namespace profiles

struct NondegeneracyReport {
    double min_sum = 0.0;
    double witness_y = 0.0;
    bool pass = false;
    int order = 0;
};

/// min over the grid of |v'| + ... + |v^{(order)}|; order defaults to p.m().
NondegeneracyReport check_nondegeneracy(const ShearProfile& p, std::span<const double> grid,
                                        std::optional<int> order = std::nullopt,
                                        double tolerance = 1e-12);

enum class Trend { Increasing, Flat, Vanishing };
std::string to_string(Trend t);

struct InfinityReport {
    double liminf_estimate = 0.0;
    Trend trend = Trend::Flat;
    bool pass = true;
    bool vacuous = false;
    std::vector<double> shell_minima;
};

/// Finite proxy for liminf_{|y|->inf} |v'|. Shell i is the set of points at
/// distance probe_radii[i] on each unbounded side.
InfinityReport check_infinity_nondegeneracy(const ShearProfile& p, std::span<const double> probe_radii,
                                            double tolerance = 1e-12);

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

} // namespace shear
