#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freefront/apriori_bounds.hpp"
#include "freefront/errors.hpp"
#include "freefront/field_model.hpp"
#include "freefront/multiplier.hpp"
#include "freefront/penalty_solver.hpp"
#include "freefront/projection_solver.hpp"
#include "freefront/report.hpp"
#include "freefront/scenario_io.hpp"
#include "freefront/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using namespace freefront;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitSolver = 4;
constexpr int kExitBounds = 5;

struct CommonArgs {
    std::string scenario_path;
    int grid = 401;
    std::string eta_average = "literal";
    bool force = false;
};

EtaAverage parse_average(const std::string& word) {
    return word == "shifted" ? EtaAverage::shifted : EtaAverage::literal;
}

void print_certificate(const BoundsCertificate& cert) {
    auto line = [](const char* name, const CertValue& v, double checked) {
        std::printf("  %-10s %-24.17g (%s; checked %.17g)\n", name, v.value,
                    v.provenance == Provenance::declared ? "declared" : "estimated", checked);
    };
    std::printf("certificate:\n");
    line("u_lip", cert.u_lip, cert.checked_u_lip());
    line("u0_max", cert.u0_max, cert.checked_u0_max());
    line("gamma_max", cert.gamma_max, cert.checked_gamma_max());
    line("c_gamma", cert.c_gamma, cert.checked_c_gamma());
    line("eta_star", cert.eta_star, cert.checked_eta_star());
    std::printf("  %-10s %.17g\n", "gamma_star", cert.gamma_star);
    std::printf("  window for (alpha, rho): %s\n",
                cert.valid() ? "admissible" : "empty (eta* does not clear gamma*)");
}

void print_issues(const std::vector<HypothesisIssue>& issues) {
    for (const HypothesisIssue& issue : issues)
        std::fprintf(stderr, "hypothesis violated: %s at (t=%.6g, x=%.6g), observed %.6g  %s\n",
                     issue.hypothesis.c_str(), issue.t, issue.x, issue.observed,
                     issue.detail.c_str());
}

ValidationResult validate_or_exit(const Scenario& sc, const CommonArgs& args, int& exit_code) {
    GridSpec grid{args.grid, args.grid};
    ValidationResult validation = validate_hypotheses(sc, grid, parse_average(args.eta_average));
    exit_code = kExitOk;
    if (!validation.valid()) {
        print_issues(validation.violations);
        if (!args.force) exit_code = kExitHypothesis;
    }
    return validation;
}

json rate_fit_to_json(const RateFit& fit) {
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    return json{{"slope", num(fit.slope)},
                {"intercept", num(fit.intercept)},
                {"r_squared", num(fit.r_squared)}};
}

int run_validate(const CommonArgs& args) {
    const Scenario sc = read_scenario(args.scenario_path);
    int code = kExitOk;
    const ValidationResult validation = validate_or_exit(sc, args, code);
    print_certificate(validation.certificate);
    return validation.valid() ? kExitOk : kExitHypothesis;
}

int run_solve(const CommonArgs& args, const std::string& method, PenaltyOptions popts,
              ProjectionOptions jopts, MultiplierOptions mopts, const std::string& out_dir,
              std::optional<double> alpha, std::optional<double> rho) {
    const Scenario sc = read_scenario(args.scenario_path);
    int code = kExitOk;
    const ValidationResult validation = validate_or_exit(sc, args, code);
    if (code != kExitOk) return code;
    const BoundsCertificate& cert = validation.certificate;

    const auto t0 = std::chrono::steady_clock::now();
    Trajectory traj;
    if (method == "penalty")
        traj = solve_penalized(sc, popts);
    else
        traj = solve_projected(sc, jopts);

    std::optional<EstimateParams> params;
    if (alpha && rho) params = EstimateParams{*alpha, *rho};
    RunReport report = make_run_report(traj, sc, cert, mopts, params);
    report.penalty = popts;
    report.projection = jopts;
    const auto t1 = std::chrono::steady_clock::now();
    report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

    const std::string stem = fs::path(args.scenario_path).stem().string();
    fs::create_directories(out_dir);
    const std::string csv_name = stem + "." + method + ".csv";
    const std::string report_name = stem + "." + method + ".report.json";
    report.trajectory_file = csv_name;

    const MultiplierDecomposition decomp = reconstruct_multiplier(traj, sc, cert, mopts);
    const std::vector<Regime> regimes = classify_regimes(traj, sc, decomp, cert, mopts);
    write_trajectory_csv(traj, sc, regimes, (fs::path(out_dir) / csv_name).string());
    write_report(report, (fs::path(out_dir) / report_name).string());

    std::printf("%s run: %zu samples, L(%.17g) = %.17g, %zu atom(s), defect %.3g\n",
                method.c_str(), traj.size(), traj.times.back(), traj.positions.back(),
                report.atoms.size(), report.defect);
    if (report.truncation)
        std::printf("truncated at t = %.17g: %s\n", report.truncation->time,
                    report.truncation->reason.c_str());
    for (const BoundEntry& e : report.bounds.entries)
        std::printf("  bound %-24s %s (observed %.6g, bound %.6g)\n", e.name.c_str(),
                    e.satisfied ? "ok" : "VIOLATED", e.observed, e.bound);
    std::printf("wrote %s and %s in %s\n", csv_name.c_str(), report_name.c_str(),
                out_dir.c_str());
    return report.bounds.all_satisfied ? kExitOk : kExitBounds;
}

int run_sweep(const CommonArgs& args, const std::vector<double>& epsilons, PenaltyOptions popts,
              ProjectionOptions jopts, MultiplierOptions mopts, const std::string& out_dir) {
    const Scenario sc = read_scenario(args.scenario_path);
    int code = kExitOk;
    const ValidationResult validation = validate_or_exit(sc, args, code);
    if (code != kExitOk) return code;

    SweepOptions opts;
    opts.penalty = popts;
    opts.projection = jopts;
    opts.multiplier = mopts;
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult result = epsilon_sweep(sc, epsilons, opts);
    const auto t1 = std::chrono::steady_clock::now();

    json payload;
    payload["scenario"] = json::parse(scenario_to_json(sc));
    payload["epsilons"] = result.epsilons;
    json entries = json::array();
    bool all_ok = true;
    for (const SweepEntry& e : result.entries) {
        json entry;
        entry["epsilon"] = e.epsilon;
        entry["final_time"] = e.final_time;
        entry["final_position"] = e.final_position;
        entry["samples"] = e.samples;
        entry["atom_count"] = e.atom_count;
        entry["violation"] = json{{"sup", e.violation.sup_violation}, {"l2_sq", e.violation.l2_sq}};
        entry["all_bounds_satisfied"] = e.bounds.all_satisfied;
        all_ok = all_ok && e.bounds.all_satisfied;
        entries.push_back(entry);
    }
    payload["entries"] = entries;
    payload["cauchy"] = result.cauchy;
    payload["rate_fit"] = rate_fit_to_json(result.rate_fit);
    payload["oracle_gap"] = result.oracle_gap;

    json doc;
    doc["payload"] = payload;
    doc["timing"] = json{{"wall_seconds", std::chrono::duration<double>(t1 - t0).count()}};

    fs::create_directories(out_dir);
    const std::string stem = fs::path(args.scenario_path).stem().string();
    const std::string name = stem + ".sweep.json";
    std::ofstream file(fs::path(out_dir) / name, std::ios::binary);
    if (!file) throw IoError("cannot open sweep report for writing");
    file << doc.dump(2) << "\n";

    std::printf("sweep over %zu epsilons: rate slope %.4g (R^2 %.4g), oracle gap %.4g\n",
                result.epsilons.size(), result.rate_fit.slope, result.rate_fit.r_squared,
                result.oracle_gap);
    std::printf("wrote %s in %s\n", name.c_str(), out_dir.c_str());
    return all_ok ? kExitOk : kExitBounds;
}

int run_compare(const CommonArgs& args, PenaltyOptions popts, ProjectionOptions jopts,
                MultiplierOptions mopts) {
    const Scenario sc = read_scenario(args.scenario_path);
    int code = kExitOk;
    validate_or_exit(sc, args, code);
    if (code != kExitOk) return code;

    CompareOptions opts;
    opts.penalty = popts;
    opts.projection = jopts;
    opts.multiplier = mopts;
    const double gap = compare_solvers(sc, opts);
    std::printf("sup distance off jump windows: %.17g\n", gap);
    return kExitOk;
}

int run_check(const std::string& report_path) {
    const CheckResult result = check_report(report_path);
    if (result.ok) {
        std::printf("report verified: every stored verdict reproduced\n");
        return kExitOk;
    }
    for (const std::string& d : result.diffs) std::fprintf(stderr, "mismatch: %s\n", d.c_str());
    return kExitBounds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained front propagation: solvers, multiplier analysis, bound checks"};
    app.require_subcommand(1);

    CommonArgs args;
    PenaltyOptions popts;
    ProjectionOptions jopts;
    MultiplierOptions mopts;
    std::string method = "penalty";
    std::string out_dir = ".";
    std::vector<double> epsilons;
    std::optional<double> alpha, rho;
    bool truncate = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", args.scenario_path, "scenario JSON file")->required();
        cmd->add_option("--grid", args.grid, "validation grid points per axis");
        cmd->add_option("--eta-average", args.eta_average, "eta* average convention")
            ->check(CLI::IsMember({"literal", "shifted"}));
        cmd->add_flag("--force", args.force, "continue despite hypothesis violations");
    };
    auto add_solver_knobs = [&](CLI::App* cmd) {
        cmd->add_option("--epsilon", popts.epsilon, "penalty parameter");
        cmd->add_option("--rel-tol", popts.rel_tol, "penalty step error tolerance");
        cmd->add_option("--h-init", popts.h_init, "penalty step ceiling (0: T/1000)");
        cmd->add_option("--step", jopts.h, "projection step (0: T/10000)");
        cmd->add_option("--scan-step", jopts.scan_step,
                        "projection forward-scan step (0: span/10000)");
        cmd->add_option("--root-tol", jopts.root_tol, "projection bisection tolerance");
        cmd->add_option("--jump-speed-factor", mopts.jump_speed_factor,
                        "speed multiple marking penalty jump windows");
        cmd->add_option("--contact-tol", mopts.contact_tol,
                        "contact band half-width (0: 1e-3 (Gamma_max - gamma*))");
        cmd->add_flag("--truncate-at-xmax", truncate,
                      "stop cleanly when the front reaches X_max");
    };

    CLI::App* validate = app.add_subcommand("validate", "check hypotheses, print certificate");
    add_common(validate);

    CLI::App* solve = app.add_subcommand("solve", "run one solver and write CSV + report");
    add_common(solve);
    add_solver_knobs(solve);
    solve->add_option("--method", method, "solver")->check(CLI::IsMember({"penalty", "projection"}));
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--alpha", alpha, "estimate parameter alpha");
    solve->add_option("--rho", rho, "estimate parameter rho");

    CLI::App* sweep = app.add_subcommand("sweep", "epsilon sweep with rate fit");
    add_common(sweep);
    add_solver_knobs(sweep);
    sweep->add_option("--epsilons", epsilons, "decreasing penalty parameters")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", out_dir, "output directory");

    CLI::App* compare = app.add_subcommand("compare", "penalty vs projection sup distance");
    add_common(compare);
    add_solver_knobs(compare);

    std::string report_path;
    CLI::App* check = app.add_subcommand("check", "re-run every bound check of a report");
    check->add_option("report", report_path, "run report JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitSchema;
    }

    try {
        popts.stop_at_xmax = truncate;
        jopts.allow_truncation = truncate;
        if (validate->parsed()) return run_validate(args);
        if (solve->parsed())
            return run_solve(args, method, popts, jopts, mopts, out_dir, alpha, rho);
        if (sweep->parsed()) return run_sweep(args, epsilons, popts, jopts, mopts, out_dir);
        if (compare->parsed()) return run_compare(args, popts, jopts, mopts);
        if (check->parsed()) return run_check(report_path);
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "scenario error: %s\n", e.what());
        return kExitSchema;
    } catch (const ExpressionSyntaxError& e) {
        std::fprintf(stderr, "expression error at offset %zu: %s\n", e.offset, e.what());
        return kExitSchema;
    } catch (const UnknownIdentifierError& e) {
        std::fprintf(stderr, "expression error at offset %zu: %s\n", e.offset, e.what());
        return kExitSchema;
    } catch (const InvalidEstimateParamsError& e) {
        std::fprintf(stderr, "estimate parameter error: %s\n", e.what());
        return kExitBounds;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitSchema;
    } catch (const Error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return kExitSolver;
    }
    return kExitOk;
}
