#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "freefront/apriori_bounds.hpp"
#include "freefront/field_model.hpp"
#include "freefront/multiplier.hpp"
#include "freefront/penalty_solver.hpp"
#include "freefront/projection_solver.hpp"
#include "freefront/trajectory.hpp"

namespace freefront {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/** Ordinary least squares on (log epsilon, log value); requires at least
 *  three points with positive coordinates. */
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct SweepEntry {
    double epsilon = 0.0;
    double final_time = 0.0;
    double final_position = 0.0;
    std::size_t samples = 0;
    std::size_t atom_count = 0;
    ViolationMetrics violation;
    BoundSuite bounds;
};

struct SweepResult {
    std::vector<double> epsilons;
    std::vector<SweepEntry> entries;
    /** Sup distance between consecutive-epsilon runs off jump windows; one
     *  entry per adjacent pair. */
    std::vector<double> cauchy;
    /** Log-log fit of the L2 violation integral against epsilon; NaN slope
     *  when the sweep is too short or the violation vanishes. */
    RateFit rate_fit;
    /** Sup distance between the finest penalty run and the projection
     *  baseline, off jump windows. */
    double oracle_gap = 0.0;
};

struct SweepOptions {
    PenaltyOptions penalty;        // epsilon is overridden per sweep entry
    ProjectionOptions projection;  // baseline for oracle_gap
    MultiplierOptions multiplier;
    std::optional<EstimateParams> params;
    /** Half-width of the exclusion window around each atom; 0 derives
     *  10 * epsilon * (X_max - L0) / depth with a floor of 10 steps, using the
     *  finer epsilon of each compared pair. */
    double w_jump = 0.0;
    int comparison_samples = 2001;
};

SweepResult epsilon_sweep(const Scenario& sc, const std::vector<double>& epsilons,
                          const SweepOptions& opts = {});

struct CompareOptions {
    PenaltyOptions penalty;
    ProjectionOptions projection;
    MultiplierOptions multiplier;
    double w_jump = 0.0;
    int comparison_samples = 2001;
};

/** Sup over shared times, off jump windows, of the distance between the two
 *  methods' fronts.  Throws JumpWindowsDisagreeError when they detect a
 *  different number of atoms. */
double compare_solvers(const Scenario& sc, const CompareOptions& opts);
double compare_solvers(const Scenario& sc, double epsilon, double h);

/** Linear interpolation of the sampled front at time t (clamped to the run). */
double interpolate_position(const Trajectory& traj, double t);

/** Worst-case constraint violation depth over a scan grid,
 *  max(gamma_star - Gamma, 0); sizes the jump exclusion windows. */
double violation_depth_estimate(const Scenario& sc, const GridSpec& grid = {});

}  // namespace freefront
