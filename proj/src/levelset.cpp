// SPDX-License-Identifier: Apache-2.0
#include "shearlab/levelset.hpp"

#include "shearlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shear {

namespace {

void check_window(const ShearProfile& p, Interval w)
{
    require(w.lo < w.hi, ErrorCode::InvalidArgument, "window must satisfy lo < hi");
    require(p.domain().contains(w.lo) && p.domain().contains(w.hi), ErrorCode::OutOfDomain,
            "window must lie inside the domain of " + p.name());
}

// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must not
// have the same strict sign.
template <class F>
double bisect(F&& f, double lo, double hi, double tol)
{
    double flo = f(lo);
    if (flo == 0.0) return lo;
    if (f(hi) == 0.0) return hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<Interval> merge(std::vector<Interval> in, double tol)
{
    std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& iv : in) {
        if (iv.hi <= iv.lo) continue;
        if (!out.empty() && iv.lo <= out.back().hi + tol) {
            out.back().hi = std::max(out.back().hi, iv.hi);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

SetMeasure finish(std::vector<Interval> ivs, const ShearProfile& p, Interval window, double tol)
{
    SetMeasure s;
    s.intervals = merge(std::move(ivs), tol);
    const auto& d = p.domain();
    const double edge_tol = 16.0 * tol * std::max(1.0, std::max(std::abs(window.lo), std::abs(window.hi)));
    for (const auto& iv : s.intervals) {
        s.measure += iv.length();
        if (d.unbounded_left() && iv.lo <= window.lo + edge_tol) s.truncation_saturated = true;
        if (d.unbounded_right() && iv.hi >= window.hi - edge_tol) s.truncation_saturated = true;
    }
    return s;
}

} // namespace

Interval default_window(const DomainSpec& d, double span)
{
    switch (d.kind) {
    case DomainKind::Interval: return {d.a, d.b};
    case DomainKind::FullLine: return {-span, span};
    case DomainKind::HalfLineRight: return {d.a, d.a + span};
    case DomainKind::HalfLineLeft: return {d.b - span, d.b};
    }
    return {d.a, d.b};
}

std::vector<MonotonePiece> find_monotone_pieces(const ShearProfile& p, Interval window,
                                                const LevelSetOptions& opt)
{
    check_window(p, window);
    require(opt.tol > 0.0 && opt.samples >= 2, ErrorCode::InvalidArgument, "bad level-set options");

    const auto dv = [&p](double y) { return p.derivative(y, 1); };
    const std::size_t cells = opt.samples;
    const double step = window.length() / static_cast<double>(cells);

    std::vector<double> breakpoints;
    int first_sign = 0;
    int last_sign = 0;
    double last_y = window.lo;
    int zero_run = 0;
    for (std::size_t i = 0; i <= cells; ++i) {
        const double y = (i == cells) ? window.hi : window.lo + static_cast<double>(i) * step;
        double order_sum = 0.0;
        for (int j = 1; j <= p.m(); ++j) order_sum += std::abs(p.derivative(y, j));
        if (order_sum <= opt.tol) {
            fail(ErrorCode::DegenerateProfile,
                 p.name() + ": derivatives up to order m vanish at y=" + std::to_string(y));
        }
        const int s = sign_of(dv(y));
        if (s == 0) {
            if (++zero_run >= 2) {
                fail(ErrorCode::DegenerateProfile, p.name() + ": v' vanishes on a subinterval");
            }
            continue;
        }
        zero_run = 0;
        if (last_sign == 0) {
            first_sign = s;
        } else if (s != last_sign) {
            breakpoints.push_back(bisect(dv, last_y, y, opt.tol));
        }
        last_sign = s;
        last_y = y;
    }
    if (first_sign == 0) fail(ErrorCode::DegenerateProfile, p.name() + ": v' vanishes on the window");

    std::vector<MonotonePiece> pieces;
    double lo = window.lo;
    Direction dir = first_sign > 0 ? Direction::Up : Direction::Down;
    for (double b : breakpoints) {
        if (b > lo) pieces.push_back({lo, b, dir});
        lo = b;
        dir = (dir == Direction::Up) ? Direction::Down : Direction::Up;
    }
    if (window.hi > lo) pieces.push_back({lo, window.hi, dir});
    return pieces;
}

std::vector<double> level_set_points(const ShearProfile& p, double lambda, Interval window,
                                     const LevelSetOptions& opt)
{
    const auto pieces = find_monotone_pieces(p, window, opt);
    std::vector<double> roots;
    const auto f = [&](double y) { return p(y) - lambda; };
    for (const auto& piece : pieces) {
        const double flo = f(piece.lo);
        const double fhi = f(piece.hi);
        if (std::min(flo, fhi) > 0.0 || std::max(flo, fhi) < 0.0) continue;
        const double r = bisect(f, piece.lo, piece.hi, opt.tol);
        if (roots.empty() || r - roots.back() > 8.0 * opt.tol) roots.push_back(r);
    }
    return roots;
}

SetMeasure thickened_measure(const ShearProfile& p, double lambda, double delta, int m, Interval window,
                             const LevelSetOptions& opt)
{
    require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
    require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
    const double eps = std::pow(delta, m);
    const auto pieces = find_monotone_pieces(p, window, opt);

    std::vector<Interval> ivs;
    for (const auto& piece : pieces) {
        const double flo = p(piece.lo);
        const double fhi = p(piece.hi);
        const double vmin = std::min(flo, fhi);
        const double vmax = std::max(flo, fhi);
        if (vmax <= lambda - eps || vmin >= lambda + eps) continue;

        const auto root = [&](double level) {
            return bisect([&](double y) { return p(y) - level; }, piece.lo, piece.hi, opt.tol);
        };
        double lo = piece.lo;
        double hi = piece.hi;
        if (piece.direction == Direction::Up) {
            if (flo <= lambda - eps) lo = root(lambda - eps);
            if (fhi >= lambda + eps) hi = root(lambda + eps);
        } else {
            if (flo >= lambda + eps) lo = root(lambda + eps);
            if (fhi <= lambda - eps) hi = root(lambda - eps);
        }
        if (hi > lo) ivs.push_back({lo, hi});
    }
    return finish(std::move(ivs), p, window, opt.tol);
}

SetMeasure neighborhood_of(const SetMeasure& thickened, double delta, const ShearProfile& p, Interval window)
{
    std::vector<Interval> grown;
    grown.reserve(thickened.intervals.size());
    for (const auto& iv : thickened.intervals) {
        grown.push_back({std::max(window.lo, iv.lo - delta), std::min(window.hi, iv.hi + delta)});
    }
    return finish(std::move(grown), p, window, 1e-12);
}

SetMeasure neighborhood_measure(const ShearProfile& p, double lambda, double delta, int m, Interval window,
                                const LevelSetOptions& opt)
{
    return neighborhood_of(thickened_measure(p, lambda, delta, m, window, opt), delta, p, window);
}

double distance_to(std::span<const Interval> set, double y)
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& iv : set) {
        if (y >= iv.lo && y <= iv.hi) return 0.0;
        d = std::min(d, y < iv.lo ? iv.lo - y : y - iv.hi);
    }
    return d;
}

CutoffFunction::CutoffFunction(const ShearProfile& p, double lambda, double delta, int m, Interval window,
                               const LevelSetOptions& opt)
    : profile_(&p), lambda_(lambda), delta_(delta),
      thickened_(thickened_measure(p, lambda, delta, m, window, opt)),
      neighborhood_(neighborhood_of(thickened_, delta, p, window))
{
}

double CutoffFunction::operator()(double y) const
{
    const double s = static_cast<double>(sign_of((*profile_)(y) - lambda_));
    const double d = distance_to(thickened_.intervals, y);
    if (std::isinf(d)) return s;
    return std::clamp(s * d / delta_, -1.0, 1.0);
}

bool CutoffFunction::in_neighborhood(double y) const
{
    return distance_to(thickened_.intervals, y) < delta_;
}

double cutoff_chi(const ShearProfile& p, double lambda, double delta, int m, Interval window, double y)
{
    return CutoffFunction(p, lambda, delta, m, window)(y);
}

MeasureSweep measure_sweep(const ShearProfile& p, std::span<const double> lambda_grid,
                           std::span<const double> delta_grid, int m, Interval window, Exec exec,
                           const LevelSetOptions& opt)
{
    require(!lambda_grid.empty() && !delta_grid.empty(), ErrorCode::EmptyGrid, "empty sweep grid");
    for (double d : delta_grid) require(d > 0.0 && d < 1.0, ErrorCode::InvalidArgument, "delta outside (0,1)");

    // Fail fast on degenerate profiles before spawning workers.
    (void)find_monotone_pieces(p, window, opt);

    const std::size_t nl = lambda_grid.size();
    const std::size_t total = nl * delta_grid.size();
    MeasureSweep out;
    out.deltas.assign(delta_grid.begin(), delta_grid.end());
    out.rows.resize(total);

    auto compute = [&](std::size_t idx) {
        const double delta = delta_grid[idx / nl];
        const double lambda = lambda_grid[idx % nl];
        const auto e = thickened_measure(p, lambda, delta, m, window, opt);
        const auto ecal = neighborhood_of(e, delta, p, window);
        MeasureRow row;
        row.lambda = lambda;
        row.delta = delta;
        row.m = m;
        row.measure_E = e.measure;
        row.measure_Ecal = ecal.measure;
        row.ratio = ecal.measure / delta;
        row.saturated = e.truncation_saturated || ecal.truncation_saturated;
        out.rows[idx] = row;
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
            compute(static_cast<std::size_t>(idx));
        }
    } else {
        for (std::size_t idx = 0; idx < total; ++idx) compute(idx);
    }

    out.sup_ratio_per_delta.assign(delta_grid.size(), 0.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const auto& row = out.rows[idx];
        if (row.saturated) {
            ++out.saturated_rows;
            continue;
        }
        auto& s = out.sup_ratio_per_delta[idx / nl];
        s = std::max(s, row.ratio);
        out.sup_ratio = std::max(out.sup_ratio, row.ratio);
    }
    return out;
}

} // namespace shear
