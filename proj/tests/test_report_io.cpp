#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "freefront/errors.hpp"
#include "freefront/field_model.hpp"
#include "freefront/multiplier.hpp"
#include "freefront/penalty_solver.hpp"
#include "freefront/projection_solver.hpp"
#include "freefront/report.hpp"
#include "freefront/scenario_io.hpp"
#include "oracles.hpp"

using namespace freefront;

namespace {

Scenario band_scenario() {
    Scenario sc;
    sc.gamma = FieldSpec::gauss_band(1.0, 0.0, 0.5);
    sc.velocity = FieldSpec::constant(0.2);
    sc.gamma_star = 0.62;
    sc.L0 = 0.0;
    sc.T = 8.0;
    sc.X_max = 6.0;
    return sc;
}

std::filesystem::path work_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "freefront_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    std::ostringstream buf;
    buf << file.rdbuf();
    return buf.str();
}

void spit(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    REQUIRE(file.good());
    file << text;
}

const char* kBandScenarioText = R"({
  "gamma": {"kind": "gauss_band", "a0": 1.0, "a1": 0.0, "gamma0": 0.5},
  "velocity": {"kind": "constant", "value": 0.2},
  "gamma_star": 0.62,
  "L0": 0.0,
  "T": 8.0,
  "X_max": 6.0
})";

}  // namespace

TEST_CASE("scenario parsing covers every field family") {
    const Scenario sc = parse_scenario_json(kBandScenarioText);
    CHECK(sc.gamma.kind == FieldKind::gauss_band);
    CHECK(sc.gamma.eval(0.0, 1.0) ==
          doctest::Approx(oracles::kOneMinusInvE).epsilon(1e-14));
    CHECK(sc.velocity.eval(3.0, 1.0) == 0.2);
    CHECK(sc.gamma_star == 0.62);
    CHECK(sc.T == 8.0);
    CHECK(sc.X_max == 6.0);
    CHECK_FALSE(sc.declared.has_value());

    SUBCASE("bare formulas and declared bounds") {
        const Scenario expr = parse_scenario_json(R"json({
          "gamma": {"formula": "1 - x*exp(-x^2)"},
          "velocity": {"kind": "affine_t", "a0": 0.2, "a1": 0.01},
          "gamma_star": 0.62,
          "L0": 0.0,
          "T": 5.0,
          "X_max": 2.0,
          "bounds": {"u_lip": 0.0, "u0_max": 0.25}
        })json");
        CHECK(expr.gamma.kind == FieldKind::expression);
        CHECK(expr.gamma.eval(0.0, 1.0) ==
              doctest::Approx(oracles::kOneMinusInvE).epsilon(1e-14));
        CHECK(expr.velocity.eval(2.0, 0.0) == doctest::Approx(0.22).epsilon(1e-15));
        REQUIRE(expr.declared.has_value());
        CHECK(expr.declared->u_lip == 0.0);
        CHECK(expr.declared->u0_max == 0.25);
        CHECK_FALSE(expr.declared->eta_star.has_value());
    }
}

TEST_CASE("scenario schema violations carry the offending key") {
    auto parse_expecting = [](const std::string& text, const std::string& needle) {
        try {
            parse_scenario_json(text);
            FAIL_CHECK("expected SchemaError for " << needle);
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    parse_expecting(R"({
      "gamma": {"kind": "constant", "value": 0.9},
      "velocity": {"kind": "constant", "value": 0.2},
      "gamma_star": 0.62, "L0": 0.0, "T": 5.0, "X_max": 2.0,
      "viscosity": 1.0
    })",
                    "viscosity");
    parse_expecting(R"({
      "gamma": {"kind": "constant", "value": 0.9, "slope": 1.0},
      "velocity": {"kind": "constant", "value": 0.2},
      "gamma_star": 0.62, "L0": 0.0, "T": 5.0, "X_max": 2.0
    })",
                    "gamma.slope");
    parse_expecting(R"({
      "gamma": {"kind": "constant", "value": 0.9},
      "velocity": {"kind": "constant", "value": 0.2},
      "gamma_star": -1.0, "L0": 0.0, "T": 5.0, "X_max": 2.0
    })",
                    "gamma_star");
    parse_expecting(R"({
      "gamma": {"kind": "constant", "value": 0.9},
      "gamma_star": 0.62, "L0": 0.0, "T": 5.0, "X_max": 2.0
    })",
                    "velocity");
    parse_expecting(R"({
      "gamma": {"kind": "gauss_band", "a0": 1.0, "gamma0": -0.5},
      "velocity": {"kind": "constant", "value": 0.2},
      "gamma_star": 0.62, "L0": 0.0, "T": 5.0, "X_max": 2.0
    })",
                    "gamma0");
    parse_expecting(R"({
      "gamma": {"kind": "constant", "value": 0.9},
      "velocity": {"kind": "constant", "value": 0.2},
      "gamma_star": 0.62, "L0": 0.0, "T": 5.0, "X_max": 2.0,
      "bounds": {"lipschitz": 0.1}
    })",
                    "bounds.lipschitz");
    CHECK_THROWS_AS(parse_scenario_json("{ not json"), SchemaError);
    CHECK_THROWS_AS(parse_scenario_json("[1, 2]"), SchemaError);
}

TEST_CASE("scenario serialization is a fixed point") {
    for (const char* text : {kBandScenarioText, R"json({
      "gamma": {"formula": "1 - 0.05*t - x*exp(-x^2)"},
      "velocity": {"kind": "constant", "value": 0.01},
      "gamma_star": 0.62, "L0": 0.0, "T": 12.0, "X_max": 2.4,
      "bounds": {"gamma_max": 1.0}
    })json"}) {
        const Scenario sc = parse_scenario_json(text);
        const std::string one = scenario_to_json(sc);
        const Scenario back = parse_scenario_json(one);
        CHECK(scenario_to_json(back) == one);
        CHECK(back.gamma.eval(1.0, 0.7) == sc.gamma.eval(1.0, 0.7));
        CHECK(back.velocity.eval(1.0, 0.7) == sc.velocity.eval(1.0, 0.7));
    }
}

TEST_CASE("trajectory CSV round-trips bitwise") {
    const Scenario sc = band_scenario();
    const ValidationResult v = validate_hypotheses(sc);
    REQUIRE(v.valid());
    ProjectionOptions opts;
    opts.h = 8e-3;
    const Trajectory traj = solve_projected(sc, opts);
    const MultiplierDecomposition decomp =
        reconstruct_multiplier(traj, sc, v.certificate);
    const std::vector<Regime> regimes = classify_regimes(traj, sc, decomp, v.certificate);

    const auto path = work_dir() / "band.projection.csv";
    write_trajectory_csv(traj, sc, regimes, path.string());

    const Trajectory back = read_trajectory_csv(path.string(), SolveMethod::projection);
    REQUIRE(back.size() == traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(back.times[i] == traj.times[i]);
        CHECK(back.positions[i] == traj.positions[i]);
        CHECK(back.mu[i] == traj.mu[i]);
    }

    SUBCASE("repeat writes are byte-identical") {
        const std::string first = slurp(path);
        const auto again = work_dir() / "band.projection.repeat.csv";
        write_trajectory_csv(traj, sc, regimes, again.string());
        CHECK(slurp(again) == first);
        CHECK(first.rfind("t,L,gamma,U,mu,regime,violation\n", 0) == 0);
    }
    SUBCASE("header tampering is caught on read") {
        const auto bad = work_dir() / "band.header.csv";
        std::string text = slurp(path);
        text[0] = 'x';
        spit(bad, text);
        CHECK_THROWS_AS(read_trajectory_csv(bad.string(), SolveMethod::projection),
                        IoError);
    }
    SUBCASE("label misalignment is rejected on write") {
        std::vector<Regime> short_labels(regimes.begin(), regimes.end() - 1);
        CHECK_THROWS_AS(
            write_trajectory_csv(traj, sc, short_labels, path.string()),
            InconsistentTrajectoryError);
    }
    SUBCASE("missing files are I/O errors") {
        CHECK_THROWS_AS(
            read_trajectory_csv((work_dir() / "absent.csv").string(),
                                SolveMethod::projection),
            IoError);
    }
}

TEST_CASE("run reports round-trip and split timing from the payload") {
    const Scenario sc = band_scenario();
    const ValidationResult v = validate_hypotheses(sc);
    REQUIRE(v.valid());
    PenaltyOptions popts;
    popts.epsilon = 1e-3;
    const Trajectory traj = solve_penalized(sc, popts);

    RunReport report = make_run_report(traj, sc, v.certificate);
    report.penalty = popts;
    report.trajectory_file = "band.penalty.csv";
    report.wall_seconds = 1.25;

    REQUIRE(report.violation.has_value());
    REQUIRE(report.energy_residual.has_value());
    CHECK(report.bounds.all_satisfied);
    CHECK(report.atoms.size() == 1);

    const std::string text = report_to_json(report);
    const RunReport back = parse_report_json(text);
    CHECK(back.method == SolveMethod::penalty);
    CHECK(back.penalty.epsilon == popts.epsilon);
    CHECK(back.rows == report.rows);
    CHECK(back.final_position == report.final_position);
    CHECK(back.defect == report.defect);
    CHECK(back.violation->l2_sq == report.violation->l2_sq);
    CHECK(back.energy_residual == report.energy_residual);
    CHECK(back.bounds.entries.size() == report.bounds.entries.size());
    CHECK(back.wall_seconds == 1.25);
    CHECK(scenario_to_json(back.scenario) == scenario_to_json(sc));
    CHECK(back.certificate.eta_star.value == v.certificate.eta_star.value);

    SUBCASE("wall time does not contaminate the payload") {
        RunReport slower = report;
        slower.wall_seconds = 99.0;
        CHECK(report_to_json(slower) != text);
        CHECK(report_payload(report_to_json(slower)) == report_payload(text));
    }
    SUBCASE("uncertified bounds serialize as nulls and read back as NaN") {
        bool saw_null = false;
        for (const BoundEntry& e : back.bounds.entries)
            if (e.name == "violation_l2") {
                // no sweep constant supplied here
                saw_null = std::isnan(e.bound);
            }
        CHECK(saw_null);
    }
    SUBCASE("malformed report documents are schema errors") {
        CHECK_THROWS_AS(parse_report_json("{ nope"), SchemaError);
        CHECK_THROWS_AS(parse_report_json(R"({"timing": {}})"), SchemaError);
        CHECK_THROWS_AS(parse_report_json(R"({"payload": {"method": "penalty"}})"),
                        SchemaError);
    }
}

TEST_CASE("stored reports verify against their trajectories") {
    const Scenario sc = band_scenario();
    const ValidationResult v = validate_hypotheses(sc);
    REQUIRE(v.valid());
    PenaltyOptions popts;
    popts.epsilon = 1e-3;
    const Trajectory traj = solve_penalized(sc, popts);
    const MultiplierDecomposition decomp = reconstruct_multiplier(traj, sc, v.certificate);
    const std::vector<Regime> regimes = classify_regimes(traj, sc, decomp, v.certificate);

    const auto dir = work_dir();
    write_trajectory_csv(traj, sc, regimes, (dir / "checked.penalty.csv").string());

    RunReport report = make_run_report(traj, sc, v.certificate);
    report.penalty = popts;
    report.trajectory_file = "checked.penalty.csv";
    write_report(report, (dir / "checked.report.json").string());

    const CheckResult ok = check_report((dir / "checked.report.json").string());
    CHECK(ok.ok);
    CHECK(ok.diffs.empty());

    SUBCASE("row-count tampering is detected") {
        nlohmann::json doc = nlohmann::json::parse(slurp(dir / "checked.report.json"));
        doc["payload"]["trajectory"]["rows"] =
            doc["payload"]["trajectory"]["rows"].get<std::size_t>() + 1;
        spit(dir / "tampered_rows.report.json", doc.dump(2) + "\n");
        const CheckResult bad = check_report((dir / "tampered_rows.report.json").string());
        CHECK_FALSE(bad.ok);
        REQUIRE_FALSE(bad.diffs.empty());
        CHECK(bad.diffs.front().find("row count") != std::string::npos);
    }
    SUBCASE("verdict tampering is detected") {
        nlohmann::json doc = nlohmann::json::parse(slurp(dir / "checked.report.json"));
        auto& entry = doc["payload"]["bounds"]["entries"][0];
        entry["satisfied"] = !entry["satisfied"].get<bool>();
        spit(dir / "tampered_verdict.report.json", doc.dump(2) + "\n");
        const CheckResult bad =
            check_report((dir / "tampered_verdict.report.json").string());
        CHECK_FALSE(bad.ok);
        bool mentioned = false;
        for (const std::string& d : bad.diffs)
            mentioned = mentioned || d.find("verdict") != std::string::npos;
        CHECK(mentioned);
    }
    SUBCASE("trajectory tampering is detected") {
        std::string csv = slurp(dir / "checked.penalty.csv");
        const auto pos = csv.rfind("\n", csv.size() - 2);
        REQUIRE(pos != std::string::npos);
        spit(dir / "truncated.penalty.csv", csv.substr(0, pos + 1));
        nlohmann::json doc = nlohmann::json::parse(slurp(dir / "checked.report.json"));
        doc["payload"]["trajectory"]["file"] = "truncated.penalty.csv";
        spit(dir / "tampered_file.report.json", doc.dump(2) + "\n");
        const CheckResult bad =
            check_report((dir / "tampered_file.report.json").string());
        CHECK_FALSE(bad.ok);
    }
}
