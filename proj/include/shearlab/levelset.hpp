// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/exec.hpp"
#include "shearlab/profiles.hpp"

#include <span>
#include <vector>

namespace shear {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double y) const { return y >= lo && y <= hi; }
};

enum class Direction { Up, Down };

struct MonotonePiece {
    double lo = 0.0;
    double hi = 0.0;
    Direction direction = Direction::Up;
};

struct LevelSetOptions {
    double tol = 1e-12;             // bisection tolerance on breakpoints and roots
    std::size_t samples = 4096;     // sampling cells used to bracket sign changes of v'
};

/// Split the window into maximal pieces on which v is strictly monotone.
/// Breakpoints are the sign changes of v', located by bisection.
std::vector<MonotonePiece> find_monotone_pieces(const ShearProfile& p, Interval window,
                                                const LevelSetOptions& opt = {});

/// E_lambda within the window: one root per piece whose range brackets lambda.
std::vector<double> level_set_points(const ShearProfile& p, double lambda, Interval window,
                                     const LevelSetOptions& opt = {});

struct SetMeasure {
    double measure = 0.0;
    std::vector<Interval> intervals;
    bool truncation_saturated = false;
};

/// {y in window : |v(y) - lambda| < delta^m}, piecewise-exact.
SetMeasure thickened_measure(const ShearProfile& p, double lambda, double delta, int m, Interval window,
                             const LevelSetOptions& opt = {});

/// delta-neighbourhood of the thickened set, intersected with the window.
SetMeasure neighborhood_measure(const ShearProfile& p, double lambda, double delta, int m, Interval window,
                                const LevelSetOptions& opt = {});

/// Overload reusing an already computed thickened set.
SetMeasure neighborhood_of(const SetMeasure& thickened, double delta, const ShearProfile& p, Interval window);

/// Distance from y to a union of intervals (0 inside, +inf if empty).
double distance_to(std::span<const Interval> set, double y);

/// The odd-clipped signed distance cutoff
///   chi(y) = phi(sign(v(y) - lambda) dist(y, E) / delta),  phi(t) = clamp(t, -1, 1),
/// where E is the thickened level set on the window.
class CutoffFunction {
public:
    CutoffFunction(const ShearProfile& p, double lambda, double delta, int m, Interval window,
                   const LevelSetOptions& opt = {});

    double operator()(double y) const;

    const SetMeasure& thickened() const { return thickened_; }
    const SetMeasure& neighborhood() const { return neighborhood_; }
    bool in_neighborhood(double y) const;

private:
    const ShearProfile* profile_;
    double lambda_;
    double delta_;
    SetMeasure thickened_;
    SetMeasure neighborhood_;
};

double cutoff_chi(const ShearProfile& p, double lambda, double delta, int m, Interval window, double y);

struct MeasureRow {
    double lambda = 0.0;
    double delta = 0.0;
    int m = 1;
    double measure_E = 0.0;
    double measure_Ecal = 0.0;
    double ratio = 0.0;
    bool saturated = false;
};

struct MeasureSweep {
    std::vector<MeasureRow> rows;        // ordered by delta (outer) then lambda
    std::vector<double> deltas;
    std::vector<double> sup_ratio_per_delta; // over unsaturated rows
    double sup_ratio = 0.0;
    std::size_t saturated_rows = 0;
};

/// Ratio table m(E-neighbourhood)/delta over a (lambda, delta) grid. Rows
/// touching a truncation edge are flagged and excluded from the suprema.
MeasureSweep measure_sweep(const ShearProfile& p, std::span<const double> lambda_grid,
                           std::span<const double> delta_grid, int m, Interval window,
                           Exec exec = Exec::Parallel, const LevelSetOptions& opt = {});

/// The full closed window used when the caller does not pick one: the domain
/// itself if bounded, otherwise [a, a + span] / [-span, span] / [b - span, b].
Interval default_window(const DomainSpec& d, double span);

} // namespace shear
