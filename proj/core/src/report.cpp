#include "freefront/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "freefront/errors.hpp"
#include "freefront/scenario_io.hpp"

namespace freefront {
namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* regime_word(Regime r) {
    switch (r) {
        case Regime::interior: return "interior";
        case Regime::contact: return "contact";
        case Regime::jump: return "jump";
    }
    return "interior";
}

const char* provenance_word(Provenance p) {
    return p == Provenance::declared ? "declared" : "estimated";
}

Provenance provenance_from(const std::string& w) {
    if (w == "declared") return Provenance::declared;
    if (w == "estimated") return Provenance::estimated;
    throw SchemaError("unknown provenance \"" + w + "\"");
}

json cert_value_to_json(const CertValue& v) {
    return json{{"value", v.value}, {"provenance", provenance_word(v.provenance)}};
}

CertValue cert_value_from(const json& obj) {
    CertValue v;
    v.value = obj.at("value").get<double>();
    v.provenance = provenance_from(obj.at("provenance").get<std::string>());
    return v;
}

json atom_to_json(const JumpAtom& a) {
    return json{{"time", a.time},
                {"magnitude", a.magnitude},
                {"mass", a.mass},
                {"window_lo", a.window_lo},
                {"window_hi", a.window_hi}};
}

JumpAtom atom_from(const json& obj) {
    JumpAtom a;
    a.time = obj.at("time").get<double>();
    a.magnitude = obj.at("magnitude").get<double>();
    a.mass = obj.at("mass").get<double>();
    a.window_lo = obj.at("window_lo").get<double>();
    a.window_hi = obj.at("window_hi").get<double>();
    return a;
}

json entry_to_json(const BoundEntry& e) {
    return json{{"name", e.name},     {"observed", e.observed}, {"bound", e.bound},
                {"margin", e.margin}, {"satisfied", e.satisfied}, {"note", e.note}};
}

BoundEntry entry_from(const json& obj) {
    BoundEntry e;
    e.name = obj.at("name").get<std::string>();
    e.observed = obj.at("observed").get<double>();
    e.bound = obj.at("bound").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                        : obj.at("bound").get<double>();
    e.margin = obj.at("margin").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                          : obj.at("margin").get<double>();
    e.satisfied = obj.at("satisfied").get<bool>();
    e.note = obj.at("note").get<std::string>();
    return e;
}

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

json payload_from(const RunReport& r) {
    json payload;
    payload["scenario"] = json::parse(scenario_to_json(r.scenario));

    json cert;
    cert["u_lip"] = cert_value_to_json(r.certificate.u_lip);
    cert["u0_max"] = cert_value_to_json(r.certificate.u0_max);
    cert["gamma_max"] = cert_value_to_json(r.certificate.gamma_max);
    cert["c_gamma"] = cert_value_to_json(r.certificate.c_gamma);
    cert["eta_star"] = cert_value_to_json(r.certificate.eta_star);
    cert["gamma_star"] = r.certificate.gamma_star;
    cert["safety_factor"] = r.certificate.safety_factor;
    cert["eta_average"] =
        r.certificate.eta_average == EtaAverage::shifted ? "shifted" : "literal";
    payload["certificate"] = cert;

    payload["method"] = r.method == SolveMethod::penalty ? "penalty" : "projection";
    json params;
    params["epsilon"] = r.penalty.epsilon;
    params["h_init"] = r.penalty.h_init;
    params["h_min"] = r.penalty.h_min;
    params["rel_tol"] = r.penalty.rel_tol;
    params["stiff_factor"] = r.penalty.stiff_factor;
    params["stop_at_xmax"] = r.penalty.stop_at_xmax;
    params["h"] = r.projection.h;
    params["scan_step"] = r.projection.scan_step;
    params["root_tol"] = r.projection.root_tol;
    params["allow_truncation"] = r.projection.allow_truncation;
    params["jump_speed_factor"] = r.multiplier.jump_speed_factor;
    params["contact_tol"] = r.multiplier.contact_tol;
    payload["parameters"] = params;

    json trajectory;
    trajectory["file"] = r.trajectory_file;
    trajectory["rows"] = r.rows;
    trajectory["final_time"] = r.final_time;
    trajectory["final_position"] = r.final_position;
    payload["trajectory"] = trajectory;

    if (r.truncation)
        payload["truncation"] = json{{"time", r.truncation->time}, {"reason", r.truncation->reason}};
    else
        payload["truncation"] = nullptr;

    json decomp;
    json atoms = json::array();
    for (const JumpAtom& a : r.atoms) atoms.push_back(atom_to_json(a));
    decomp["atoms"] = atoms;
    decomp["defect"] = r.defect;
    decomp["complementarity"] = r.complementarity;
    payload["decomposition"] = decomp;

    if (r.violation)
        payload["violation"] =
            json{{"sup", r.violation->sup_violation}, {"l2_sq", r.violation->l2_sq}};
    else
        payload["violation"] = nullptr;
    payload["energy_residual"] = r.energy_residual ? json(*r.energy_residual) : json(nullptr);

    json bounds;
    if (r.bounds.params)
        bounds["params"] = json{{"alpha", r.bounds.params->alpha}, {"rho", r.bounds.params->rho}};
    else
        bounds["params"] = nullptr;
    bounds["all_satisfied"] = r.bounds.all_satisfied;
    json entries = json::array();
    for (const BoundEntry& e : r.bounds.entries) {
        json obj = entry_to_json(e);
        obj["bound"] = number_or_null(e.bound);
        obj["margin"] = number_or_null(e.margin);
        entries.push_back(obj);
    }
    bounds["entries"] = entries;
    payload["bounds"] = bounds;
    return payload;
}

RunReport report_from_payload(const json& payload, double wall_seconds) {
    RunReport r;
    r.scenario = parse_scenario_json(payload.at("scenario").dump());

    const json& cert = payload.at("certificate");
    r.certificate.u_lip = cert_value_from(cert.at("u_lip"));
    r.certificate.u0_max = cert_value_from(cert.at("u0_max"));
    r.certificate.gamma_max = cert_value_from(cert.at("gamma_max"));
    r.certificate.c_gamma = cert_value_from(cert.at("c_gamma"));
    r.certificate.eta_star = cert_value_from(cert.at("eta_star"));
    r.certificate.gamma_star = cert.at("gamma_star").get<double>();
    r.certificate.safety_factor = cert.at("safety_factor").get<double>();
    r.certificate.eta_average = cert.at("eta_average").get<std::string>() == "shifted"
                                    ? EtaAverage::shifted
                                    : EtaAverage::literal;

    r.method = payload.at("method").get<std::string>() == "projection" ? SolveMethod::projection
                                                                       : SolveMethod::penalty;
    const json& params = payload.at("parameters");
    r.penalty.epsilon = params.at("epsilon").get<double>();
    r.penalty.h_init = params.at("h_init").get<double>();
    r.penalty.h_min = params.at("h_min").get<double>();
    r.penalty.rel_tol = params.at("rel_tol").get<double>();
    r.penalty.stiff_factor = params.at("stiff_factor").get<double>();
    r.penalty.stop_at_xmax = params.at("stop_at_xmax").get<bool>();
    r.projection.h = params.at("h").get<double>();
    r.projection.scan_step = params.at("scan_step").get<double>();
    r.projection.root_tol = params.at("root_tol").get<double>();
    r.projection.allow_truncation = params.at("allow_truncation").get<bool>();
    r.multiplier.jump_speed_factor = params.at("jump_speed_factor").get<double>();
    r.multiplier.contact_tol = params.at("contact_tol").get<double>();

    const json& trajectory = payload.at("trajectory");
    r.trajectory_file = trajectory.at("file").get<std::string>();
    r.rows = trajectory.at("rows").get<std::size_t>();
    r.final_time = trajectory.at("final_time").get<double>();
    r.final_position = trajectory.at("final_position").get<double>();

    if (!payload.at("truncation").is_null()) {
        Truncation tr;
        tr.time = payload.at("truncation").at("time").get<double>();
        tr.reason = payload.at("truncation").at("reason").get<std::string>();
        r.truncation = tr;
    }

    const json& decomp = payload.at("decomposition");
    for (const json& a : decomp.at("atoms")) r.atoms.push_back(atom_from(a));
    r.defect = decomp.at("defect").get<double>();
    r.complementarity = decomp.at("complementarity").get<double>();

    if (!payload.at("violation").is_null()) {
        ViolationMetrics m;
        m.sup_violation = payload.at("violation").at("sup").get<double>();
        m.l2_sq = payload.at("violation").at("l2_sq").get<double>();
        r.violation = m;
    }
    if (!payload.at("energy_residual").is_null())
        r.energy_residual = payload.at("energy_residual").get<double>();

    const json& bounds = payload.at("bounds");
    if (!bounds.at("params").is_null()) {
        EstimateParams p;
        p.alpha = bounds.at("params").at("alpha").get<double>();
        p.rho = bounds.at("params").at("rho").get<double>();
        r.bounds.params = p;
    }
    r.bounds.all_satisfied = bounds.at("all_satisfied").get<bool>();
    for (const json& e : bounds.at("entries")) r.bounds.entries.push_back(entry_from(e));

    r.wall_seconds = wall_seconds;
    return r;
}

}  // namespace

RunReport make_run_report(const Trajectory& traj, const Scenario& sc,
                          const BoundsCertificate& cert, const MultiplierOptions& mopts,
                          std::optional<EstimateParams> params) {
    RunReport r;
    r.scenario = sc;
    r.certificate = cert;
    r.method = traj.method;
    r.multiplier = mopts;
    r.rows = traj.size();
    r.final_time = traj.times.back();
    r.final_position = traj.positions.back();
    r.truncation = traj.truncation;

    const MultiplierDecomposition decomp = reconstruct_multiplier(traj, sc, cert, mopts);
    r.atoms = decomp.atoms;
    r.defect = decomp.defect;
    r.complementarity = complementarity_residual(decomp, traj, sc);
    r.bounds = run_bound_suite(traj, sc, cert, params, mopts);
    if (traj.method == SolveMethod::penalty) {
        r.violation = violation_metrics(traj, sc);
        BoundEntry vio = violation_check(traj, sc);
        r.bounds.all_satisfied = r.bounds.all_satisfied && vio.satisfied;
        r.bounds.entries.push_back(std::move(vio));
        const double alpha = r.bounds.params ? r.bounds.params->alpha : sc.gamma_star;
        r.energy_residual = energy_identity_residual(traj, sc, alpha);
    }
    return r;
}

void write_trajectory_csv(const Trajectory& traj, const Scenario& sc,
                          const std::vector<Regime>& regimes, const std::string& path) {
    check_trajectory(traj, sc);
    if (regimes.size() != traj.size())
        throw InconsistentTrajectoryError("regime labels do not align with the trajectory");
    std::ostringstream out;
    out << "t,L,gamma,U,mu,regime,violation\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const FieldSample f = eval_fields(sc, traj.times[i], traj.positions[i]);
        const double violation = std::max(0.0, sc.gamma_star - f.gamma);
        out << fmt17(traj.times[i]) << ',' << fmt17(traj.positions[i]) << ',' << fmt17(f.gamma)
            << ',' << fmt17(f.u) << ',' << fmt17(traj.mu[i]) << ',' << regime_word(regimes[i])
            << ',' << fmt17(violation) << '\n';
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << out.str();
    if (!file) throw IoError("failed writing " + path);
}

Trajectory read_trajectory_csv(const std::string& path, SolveMethod method) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open trajectory file " + path);
    std::string line;
    if (!std::getline(file, line) || line != "t,L,gamma,U,mu,regime,violation")
        throw IoError("unexpected trajectory header in " + path);
    Trajectory traj;
    traj.method = method;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double cols[3];
        for (int c = 0; c < 5; ++c) {
            if (!std::getline(row, cell, ','))
                throw IoError("short trajectory row in " + path + ": " + line);
            if (c == 0 || c == 1 || c == 4) {
                char* end = nullptr;
                const double v = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str())
                    throw IoError("non-numeric trajectory cell in " + path + ": " + cell);
                cols[c == 0 ? 0 : (c == 1 ? 1 : 2)] = v;
            }
        }
        traj.times.push_back(cols[0]);
        traj.positions.push_back(cols[1]);
        traj.mu.push_back(cols[2]);
    }
    return traj;
}

std::string report_to_json(const RunReport& report) {
    json doc;
    doc["payload"] = payload_from(report);
    doc["timing"] = json{{"wall_seconds", report.wall_seconds}};
    return doc.dump(2) + "\n";
}

RunReport parse_report_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("payload"))
        throw SchemaError("report must be an object with a \"payload\" key");
    double wall = 0.0;
    if (doc.contains("timing") && doc.at("timing").contains("wall_seconds"))
        wall = doc.at("timing").at("wall_seconds").get<double>();
    try {
        return report_from_payload(doc.at("payload"), wall);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed report payload: ") + e.what());
    }
}

void write_report(const RunReport& report, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << report_to_json(report);
    if (!file) throw IoError("failed writing " + path);
}

RunReport read_report(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open report file " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_report_json(buf.str());
}

std::string report_payload(const std::string& report_json) {
    json doc;
    try {
        doc = json::parse(report_json);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.contains("payload")) throw SchemaError("report has no \"payload\" key");
    return doc.at("payload").dump(2) + "\n";
}

CheckResult check_report(const std::string& report_path) {
    CheckResult result;
    const RunReport stored = read_report(report_path);

    namespace fs = std::filesystem;
    fs::path traj_path = stored.trajectory_file;
    if (traj_path.is_relative()) traj_path = fs::path(report_path).parent_path() / traj_path;

    Trajectory traj = read_trajectory_csv(traj_path.string(), stored.method);
    traj.epsilon = stored.penalty.epsilon;
    traj.step = stored.projection.h;
    traj.atoms = stored.atoms;
    traj.truncation = stored.truncation;

    if (traj.size() != stored.rows) {
        result.ok = false;
        result.diffs.push_back("trajectory row count " + std::to_string(traj.size()) +
                               " does not match the declared " + std::to_string(stored.rows));
        return result;
    }

    RunReport fresh;
    try {
        fresh = make_run_report(traj, stored.scenario, stored.certificate, stored.multiplier,
                                stored.bounds.params);
    } catch (const Error& e) {
        result.ok = false;
        result.diffs.push_back(std::string("re-analysis failed: ") + e.what());
        return result;
    }

    auto compare = [&](const std::string& what, double a, double b, double tol) {
        if (std::isnan(a) && std::isnan(b)) return;
        if (std::abs(a - b) > tol * std::max({1.0, std::abs(a), std::abs(b)})) {
            result.ok = false;
            result.diffs.push_back(what + ": stored " + fmt17(a) + ", recomputed " + fmt17(b));
        }
    };

    if (fresh.atoms.size() != stored.atoms.size()) {
        result.ok = false;
        result.diffs.push_back("atom count: stored " + std::to_string(stored.atoms.size()) +
                               ", recomputed " + std::to_string(fresh.atoms.size()));
    }
    compare("defect", stored.defect, fresh.defect, 1e-9);
    compare("complementarity", stored.complementarity, fresh.complementarity, 1e-9);
    if (stored.violation && fresh.violation) {
        compare("violation sup", stored.violation->sup_violation, fresh.violation->sup_violation,
                1e-9);
        compare("violation l2_sq", stored.violation->l2_sq, fresh.violation->l2_sq, 1e-9);
    }
    if (stored.energy_residual && fresh.energy_residual)
        compare("energy residual", *stored.energy_residual, *fresh.energy_residual, 1e-9);

    if (fresh.bounds.entries.size() != stored.bounds.entries.size()) {
        result.ok = false;
        result.diffs.push_back("bound entry count: stored " +
                               std::to_string(stored.bounds.entries.size()) + ", recomputed " +
                               std::to_string(fresh.bounds.entries.size()));
        return result;
    }
    for (std::size_t i = 0; i < stored.bounds.entries.size(); ++i) {
        const BoundEntry& a = stored.bounds.entries[i];
        const BoundEntry& b = fresh.bounds.entries[i];
        if (a.name != b.name) {
            result.ok = false;
            result.diffs.push_back("bound entry " + std::to_string(i) + " name: stored " + a.name +
                                   ", recomputed " + b.name);
            continue;
        }
        if (a.satisfied != b.satisfied) {
            result.ok = false;
            result.diffs.push_back("bound \"" + a.name + "\" verdict: stored " +
                                   (a.satisfied ? "satisfied" : "violated") + ", recomputed " +
                                   (b.satisfied ? "satisfied" : "violated"));
        }
        compare("bound \"" + a.name + "\" observed", a.observed, b.observed, 1e-9);
    }
    return result;
}

}  // namespace freefront
