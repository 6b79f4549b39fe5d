#pragma once

#include "freefront/field_model.hpp"
#include "freefront/trajectory.hpp"

namespace freefront {

/**
 * Options for the projected (catch-up) solve.  Zero derives the default from
 * the scenario: h = T/1e4, scan_step = (X_max - L0)/1e4, root_tol = scan_step/100.
 */
struct ProjectionOptions {
    double h = 0.0;
    double scan_step = 0.0;
    double root_tol = 0.0;
    bool allow_truncation = false;  // stop with a partial trajectory instead of throwing
                                    // when the feasible set ahead is exhausted
};

/**
 * Smallest feasible position at or ahead of x0 at time t: returns x0 when
 * Gamma(t, x0) >= gamma_star, otherwise scans forward in scan_step increments
 * up to X_max and bisects the last bracket down to root_tol, returning the
 * feasible endpoint.  Throws NoFeasiblePointError when the scan exhausts
 * [x0, X_max].
 */
double forward_feasible_point(const Scenario& sc, double t, double x0,
                              const ProjectionOptions& opts = {});

/**
 * Uniform-grid Euler predictor with a feasibility corrector: the predicted
 * position L + h*U is replaced by forward_feasible_point whenever it lands in
 * the infeasible set.  A correction larger than scan_step is recorded as a
 * JumpAtom; the atom instant is refined by bisection along the predictor
 * segment so it resolves the true onset below grid resolution.
 */
Trajectory solve_projected(const Scenario& sc, const ProjectionOptions& opts);

}  // namespace freefront
