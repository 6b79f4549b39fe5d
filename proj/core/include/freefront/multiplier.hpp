#pragma once

#include <utility>
#include <vector>

#include "freefront/field_model.hpp"
#include "freefront/trajectory.hpp"

namespace freefront {

enum class Regime { interior, contact, jump };

struct MultiplierOptions {
    /** Discrete speeds above jump_speed_factor * (U_0max + U_Lip * X_max) mark
     *  a penalty-run sample as part of a jump window. */
    double jump_speed_factor = 10.0;
    /** Contact band half-width; 0 derives 1e-3 * (Gamma_max - gamma_star). */
    double contact_tol = 0.0;
};

/**
 * Splitting of the constraint force along a trajectory into an absolutely
 * continuous density mu_a (per sample, zero inside jump windows) and jump
 * atoms.  excluded marks samples whose centered difference would straddle a
 * window; mu_a is zero there and they do not enter the defect.  defect is the
 * sup over usable samples of |dL/dt + mu_stored - U|, the residual of the
 * governing equation with the solver's own multiplier samples against an
 * independent finite-difference derivative.
 */
struct MultiplierDecomposition {
    std::vector<double> mu_a;
    std::vector<JumpAtom> atoms;
    std::vector<unsigned char> excluded;
    double defect = 0.0;
};

double resolved_contact_tol(const BoundsCertificate& cert, const MultiplierOptions& opts);

/**
 * Reconstructs the multiplier decomposition.  Projection runs carry their
 * atoms already; penalty runs get atoms extracted as maximal windows where
 * the discrete speed exceeds the jump threshold, with
 * mass = -(position increase over the window) + integral of U over it.
 * Every atom must sit where the trajectory touches the threshold (up to the
 * boundary-layer depth for penalty runs); a stray atom raises
 * AtomOutsideContactSetError.  Initial catch-up corrections at t = 0 start
 * from infeasible data and are exempt from that check.
 */
MultiplierDecomposition reconstruct_multiplier(const Trajectory& traj, const Scenario& sc,
                                               const BoundsCertificate& cert,
                                               const MultiplierOptions& opts = {});

/** Per-sample labels: jump inside an atom window, interior where Gamma clears
 *  gamma_star by more than contact_tol, contact otherwise. */
std::vector<Regime> classify_regimes(const Trajectory& traj, const Scenario& sc,
                                     const MultiplierDecomposition& decomp,
                                     const BoundsCertificate& cert,
                                     const MultiplierOptions& opts = {});

/** Maximal sample intervals where |Gamma(t, L) - gamma_star| <= contact_tol,
 *  extended by one sample gap on each side. */
std::vector<std::pair<double, double>> contact_support(const Trajectory& traj, const Scenario& sc,
                                                       const BoundsCertificate& cert,
                                                       const MultiplierOptions& opts = {});

/** sup over usable samples of |mu_a * (Gamma - gamma_star)|. */
double complementarity_residual(const MultiplierDecomposition& decomp, const Trajectory& traj,
                                const Scenario& sc);

/** Structural validation shared by all consumers; throws
 *  InconsistentTrajectoryError on ordering or anchoring faults. */
void check_trajectory(const Trajectory& traj, const Scenario& sc);

}  // namespace freefront
