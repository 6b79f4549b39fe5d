#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freefront/field_model.hpp"
#include "freefront/multiplier.hpp"
#include "freefront/trajectory.hpp"

namespace freefront {

/** Free parameters of the a priori estimates, constrained to the window
 *  gamma_star < alpha < eta_star, 0 < rho <= alpha - gamma_star. */
struct EstimateParams {
    double alpha;
    double rho;
};

/** True when the certificate leaves room for any admissible (alpha, rho). */
bool admissible_window(const BoundsCertificate& cert);

void validate_params(const BoundsCertificate& cert, const EstimateParams& params);

/** alpha at 3/4 of the window, rho at half its ceiling. */
EstimateParams default_params(const BoundsCertificate& cert);

/** Five deterministic (alpha, rho) pairs spread across the admissible window. */
std::vector<EstimateParams> sample_params(const BoundsCertificate& cert);

struct ProofConstants {
    double C1;
    double C2;
};

/** C1 = (Gamma_max + alpha) * U_0max * T,  C2 = (Gamma_max + alpha) * U_Lip + C_Gamma. */
ProofConstants constants_C1_C2(const BoundsCertificate& cert, const EstimateParams& params,
                               double T);

struct BoundEntry {
    std::string name;
    double observed = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - observed
    bool satisfied = false;
    std::string note;
};

/** Exponential envelope on the front position at every sample; the entry
 *  records the sample of minimal margin. */
BoundEntry gronwall_check(const Trajectory& traj, const BoundsCertificate& cert,
                          const EstimateParams& params);

/** Total variation of the sampled path against the three-term bound; the
 *  third term is taken as its limit (zero) when C2 = 0. */
BoundEntry bv_seminorm_check(const Trajectory& traj, const BoundsCertificate& cert,
                             const EstimateParams& params);

/** Penalty-only: the L1 mass of the penalty multiplier against
 *  (C1/rho) e^{C2 T/(eta*-alpha)}, plus the pairing integral
 *  of mu (Gamma - alpha) against [0, C1 e^{C2 T/(eta*-alpha)}].
 *  Throws WrongMethodError on projection runs. */
std::vector<BoundEntry> penalty_l1_check(const Trajectory& traj, const Scenario& sc,
                                         const BoundsCertificate& cert,
                                         const EstimateParams& params);

struct ViolationMetrics {
    double sup_violation = 0.0;  // sup of (Gamma - gamma_star)^-
    double l2_sq = 0.0;          // time integral of ((Gamma - gamma_star)^-)^2
};

/** Penalty-only constraint-violation measurements. */
ViolationMetrics violation_metrics(const Trajectory& traj, const Scenario& sc);

/** L2 violation entry; certified against c_t * epsilon when a sweep-fitted
 *  c_t > 0 is supplied, otherwise reported uncertified. */
BoundEntry violation_check(const Trajectory& traj, const Scenario& sc, double c_t = 0.0);

/** eta* * L(t) <= integral of Gamma(t, sigma) over [L0, L(t)] at every sample
 *  (the shifted-average variant weights L(t) - L0). */
BoundEntry infimum_check(const Trajectory& traj, const Scenario& sc,
                         const BoundsCertificate& cert, int sigma_panels = 512);

/** Multiplier samples, reconstructed density, and atom masses all <= 0. */
BoundEntry sign_check(const Trajectory& traj, const MultiplierDecomposition& decomp);

/** Complementarity residual against 1e-3 * Gamma_max * sup|mu|. */
BoundEntry complementarity_check(const Trajectory& traj, const Scenario& sc,
                                 const MultiplierDecomposition& decomp,
                                 const BoundsCertificate& cert);

/**
 * Residual of the integrated energy identity
 *   j(T, L(T)) - double integral of dGamma/dt - alpha (L(T) - L0)
 *     + integral of mu (Gamma - alpha)  =  integral of U (Gamma - alpha)
 * normalized by the largest term magnitude.  refine inserts midpoints into the
 * time grid (piecewise-linear dense output) and scales the sigma grid; the
 * identity holds for any alpha, so the window constraint is not enforced here.
 */
double energy_identity_residual(const Trajectory& traj, const Scenario& sc, double alpha,
                                int refine = 1, int sigma_panels = 512);

struct BoundSuite {
    std::optional<EstimateParams> params;
    std::vector<BoundEntry> entries;
    bool all_satisfied = true;
};

/**
 * Runs every applicable check for one trajectory.  With params absent the
 * suite uses default_params when the window is admissible and otherwise keeps
 * only the window-free checks (infimum, sign, complementarity).
 */
BoundSuite run_bound_suite(const Trajectory& traj, const Scenario& sc,
                           const BoundsCertificate& cert,
                           std::optional<EstimateParams> params = std::nullopt,
                           const MultiplierOptions& mopts = {});

}  // namespace freefront
