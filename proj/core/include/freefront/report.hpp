#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freefront/apriori_bounds.hpp"
#include "freefront/field_model.hpp"
#include "freefront/multiplier.hpp"
#include "freefront/penalty_solver.hpp"
#include "freefront/projection_solver.hpp"
#include "freefront/trajectory.hpp"

namespace freefront {

/**
 * Self-describing record of one solver run: scenario echo, certificate,
 * solver and analysis parameters, trajectory file reference, multiplier
 * decomposition summary, and every bound verdict.  wall_seconds is the only
 * non-reproducible field and is serialized outside the checked payload.
 */
struct RunReport {
    Scenario scenario;
    BoundsCertificate certificate;
    SolveMethod method = SolveMethod::penalty;
    PenaltyOptions penalty;
    ProjectionOptions projection;
    MultiplierOptions multiplier;

    std::string trajectory_file;
    std::size_t rows = 0;
    double final_time = 0.0;
    double final_position = 0.0;
    std::optional<Truncation> truncation;

    std::vector<JumpAtom> atoms;
    double defect = 0.0;
    double complementarity = 0.0;
    std::optional<ViolationMetrics> violation;  // penalty runs
    std::optional<double> energy_residual;      // penalty runs
    BoundSuite bounds;

    double wall_seconds = 0.0;  // unchecked side field
};

/** Runs decomposition, bound suite, and (for penalty runs) violation metrics
 *  and the energy identity; trajectory_file and wall_seconds stay empty. */
RunReport make_run_report(const Trajectory& traj, const Scenario& sc,
                          const BoundsCertificate& cert, const MultiplierOptions& mopts = {},
                          std::optional<EstimateParams> params = std::nullopt);

/** Header `t,L,gamma,U,mu,regime,violation`, one row per sample, reals with
 *  17 significant digits; byte-deterministic.  regimes must align with the
 *  trajectory samples. */
void write_trajectory_csv(const Trajectory& traj, const Scenario& sc,
                          const std::vector<Regime>& regimes, const std::string& path);

/** Reads back a trajectory CSV; method, epsilon and step are not stored in
 *  the CSV and must be supplied (atoms likewise, for projection runs). */
Trajectory read_trajectory_csv(const std::string& path, SolveMethod method);

std::string report_to_json(const RunReport& report);
RunReport parse_report_json(const std::string& text);
void write_report(const RunReport& report, const std::string& path);
RunReport read_report(const std::string& path);

/** The checked payload: the report document minus the timing side field,
 *  re-serialized canonically. */
std::string report_payload(const std::string& report_json);

struct CheckResult {
    bool ok = true;
    std::vector<std::string> diffs;
};

/** Re-reads the trajectory referenced by a report, re-runs decomposition and
 *  every bound check, and compares the verdicts with the stored ones. */
CheckResult check_report(const std::string& report_path);

}  // namespace freefront
