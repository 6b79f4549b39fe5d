#pragma once

#include "freefront/field_model.hpp"
#include "freefront/trajectory.hpp"

namespace freefront {

/**
 * Options for the penalized solve.  Zero means "derive the default from the
 * scenario": h_init = T/1000 (also the step ceiling), h_min = 1e-12*T.
 */
struct PenaltyOptions {
    double epsilon = 1e-3;
    double h_init = 0.0;
    double h_min = 0.0;
    double rel_tol = 1e-8;
    double stiff_factor = 0.2;   // step cap h <= stiff_factor*epsilon inside the violation set
    bool stop_at_xmax = false;   // truncate the run when the position reaches X_max
};

/** Penalized constraint force: 0 for z > gamma_star, (z - gamma_star)/epsilon
 *  otherwise.  Always <= 0; equals the relaxed normal-cone selection. */
double yosida_penalty(double z, double gamma_star, double epsilon);

/** Projection onto the feasible cohesion values {z >= gamma_star}. */
double project_K(double z, double gamma_star);

/**
 * Integrates dL/dt = U(t, L) - yosida_penalty(Gamma(t, L)) with classical
 * RK4 under step-doubling error control.  Entry and exit of the violation
 * set {Gamma <= gamma_star} are refined by bisection on the step length and
 * inserted as samples; inside the set the step obeys the stiffness cap.
 * mu is stored at every accepted sample.  Throws StepUnderflowError when the
 * controller cannot proceed above h_min.
 */
Trajectory solve_penalized(const Scenario& sc, const PenaltyOptions& opts);

}  // namespace freefront
