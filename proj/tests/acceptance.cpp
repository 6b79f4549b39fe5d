// Acceptance harness: seven end-to-end checks, one line of output each.
// An optional numeric argument restricts the run to that single check so the
// timing-limited ones are measured in isolation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "freefront/apriori_bounds.hpp"
#include "freefront/errors.hpp"
#include "freefront/field_model.hpp"
#include "freefront/multiplier.hpp"
#include "freefront/penalty_solver.hpp"
#include "freefront/projection_solver.hpp"
#include "freefront/scenario_io.hpp"
#include "freefront/sweep.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace freefront;

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return std::string(buf);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct Checker {
    std::string failures;
    int recorded = 0;
    void require(bool ok, const std::string& what) {
        if (ok) return;
        ++recorded;
        if (recorded > 6) return;
        if (!failures.empty()) failures += "; ";
        failures += recorded == 6 ? "..." : what;
    }
    bool ok() const { return recorded == 0; }
};

/// Scenarios, certificates and solver runs shared between the checks, solved
/// on first use so a filtered invocation only pays for what it measures.
class RunSet {
  public:
    const Scenario& trivial() { return scenario(trivial_, "trivial.json"); }
    const Scenario& band() { return scenario(band_, "static_band.json"); }
    const Scenario& decay() { return scenario(decay_, "decaying_band.json"); }

    const BoundsCertificate& trivial_cert() { return certificate(trivial_cert_, trivial()); }
    const BoundsCertificate& band_cert() { return certificate(band_cert_, band()); }
    // The decaying field drops below the threshold in running average, so this
    // certificate carries an empty (alpha, rho) window; constants stay usable.
    const BoundsCertificate& decay_cert() { return certificate(decay_cert_, decay()); }

    const Trajectory& trivial_penalty() {
        if (!trivial_pen_)
            trivial_pen_ = solve_penalized(trivial(), PenaltyOptions{.epsilon = 1e-3, .rel_tol = 1e-8});
        return *trivial_pen_;
    }
    const Trajectory& trivial_projection() {
        if (!trivial_proj_) trivial_proj_ = solve_projected(trivial(), ProjectionOptions{.h = 5e-4});
        return *trivial_proj_;
    }
    const Trajectory& band_projection() {
        if (!band_proj_) band_proj_ = solve_projected(band(), ProjectionOptions{.h = 8e-3});
        return *band_proj_;
    }
    const Trajectory& band_penalty(double epsilon) {
        auto it = band_pens_.find(epsilon);
        if (it == band_pens_.end())
            it = band_pens_.emplace(epsilon, solve_penalized(band(), PenaltyOptions{.epsilon = epsilon}))
                     .first;
        return it->second;
    }
    const Trajectory& decay_projection() {
        if (!decay_proj_)
            decay_proj_ = solve_projected(
                decay(), ProjectionOptions{.h = 0.012, .scan_step = 0.025, .allow_truncation = true});
        return *decay_proj_;
    }
    const Trajectory& decay_penalty() {
        if (!decay_pen_)
            decay_pen_ = solve_penalized(decay(), PenaltyOptions{.epsilon = 1e-4, .stop_at_xmax = true});
        return *decay_pen_;
    }

  private:
    const Scenario& scenario(std::optional<Scenario>& slot, const char* name) {
        if (!slot) slot = read_scenario((fs::path(FREEFRONT_SCENARIO_DIR) / name).string());
        return *slot;
    }
    const BoundsCertificate& certificate(std::optional<BoundsCertificate>& slot, const Scenario& sc) {
        if (!slot) slot = validate_hypotheses(sc).certificate;
        return *slot;
    }

    std::optional<Scenario> trivial_, band_, decay_;
    std::optional<BoundsCertificate> trivial_cert_, band_cert_, decay_cert_;
    std::optional<Trajectory> trivial_pen_, trivial_proj_, band_proj_, decay_proj_, decay_pen_;
    std::map<double, Trajectory> band_pens_;
};

const std::vector<double> kSweepEpsilons = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

// Threshold factors for the jump-window extraction on penalty runs.  The band
// sweep spans boundary layers up to epsilon = 1e-2, where the default factor
// leaves under-threshold shoulder samples whose complementarity product is of
// order epsilon * threshold^2; factor 3 keeps that inside the criterion bound
// at every swept epsilon.  The decaying run drives tracking speeds up to ~1.5
// and traversal speeds in the thousands; factor 500 separates the two while
// ending the window deep enough in the layer that post-window samples already
// sit within the tracking tolerance of the constraint root.
constexpr double kBandSweepJumpFactor = 3.0;
constexpr double kDecayJumpFactor = 500.0;

bool all_zero(const std::vector<double>& values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

bool criterion1(RunSet& rs, std::string& detail) {
    Timer timer;
    Checker ck;
    const Trajectory& pen = rs.trivial_penalty();
    const Trajectory& proj = rs.trivial_projection();
    ck.require(std::abs(pen.positions.back() - 1.0) <= 1e-8,
               fmt("penalty L(5) = %.12f", pen.positions.back()));
    ck.require(std::abs(proj.positions.back() - 1.0) <= 2e-3,
               fmt("projection L(5) = %.6f", proj.positions.back()));
    ck.require(all_zero(pen.mu), "penalty multiplier not identically zero");
    ck.require(all_zero(proj.mu), "projection multiplier not identically zero");
    ck.require(pen.atoms.empty() && proj.atoms.empty(), "unexpected jump atoms");
    const double secs = timer.seconds();
    ck.require(secs < 1.0, fmt("runtime %.2f s exceeds 1 s", secs));
    detail = ck.failures;
    return ck.ok();
}

bool criterion2(RunSet& rs, std::string& detail) {
    Timer timer;
    Checker ck;
    const Trajectory& proj = rs.band_projection();
    const double x1 = oracles::band_left_root(1.0, 0.5, 0.62);
    const double x2 = oracles::band_right_root(1.0, 0.5, 0.62);
    const double t_star = x1 / 0.2;
    ck.require(proj.atoms.size() == 1, fmt("%zu atoms instead of one", proj.atoms.size()));
    if (proj.atoms.size() == 1) {
        const JumpAtom& atom = proj.atoms.front();
        ck.require(std::abs(atom.time - t_star) <= 5e-3,
                   fmt("atom time off onset by %.2e", atom.time - t_star));
        ck.require(std::abs(atom.mass + (x2 - x1)) <= 5e-3,
                   fmt("atom mass off -width by %.2e", atom.mass + (x2 - x1)));
    }
    CompareOptions co;
    co.penalty.epsilon = 1e-4;
    co.projection.h = 8e-3;
    const double gap = compare_solvers(rs.band(), co);
    ck.require(gap <= 5e-3, fmt("penalty/projection gap %.2e off jump windows", gap));
    const double secs = timer.seconds();
    ck.require(secs < 10.0, fmt("runtime %.2f s exceeds 10 s", secs));
    detail = ck.failures;
    return ck.ok();
}

bool criterion3(RunSet& rs, std::string& detail) {
    Timer timer;
    Checker ck;
    SweepOptions so;
    so.multiplier.jump_speed_factor = kBandSweepJumpFactor;
    const SweepResult sweep = epsilon_sweep(rs.band(), kSweepEpsilons, so);
    ck.require(sweep.rate_fit.slope >= 0.75 && sweep.rate_fit.slope <= 1.25,
               fmt("L2 violation rate slope %.3f outside [0.75, 1.25]", sweep.rate_fit.slope));
    ck.require(sweep.rate_fit.r_squared >= 0.95,
               fmt("rate fit R^2 %.4f below 0.95", sweep.rate_fit.r_squared));
    const double secs = timer.seconds();
    ck.require(secs < 30.0, fmt("runtime %.2f s exceeds 30 s", secs));
    detail = ck.failures;
    return ck.ok();
}

void check_contact_tracking(RunSet& rs, const Trajectory& traj, const char* label, Checker& ck) {
    const Scenario& sc = rs.decay();
    MultiplierOptions mo;
    mo.jump_speed_factor = kDecayJumpFactor;
    const MultiplierDecomposition decomp = reconstruct_multiplier(traj, sc, rs.decay_cert(), mo);
    const std::vector<Regime> regimes = classify_regimes(traj, sc, decomp, rs.decay_cert(), mo);
    ck.require(!decomp.atoms.empty(), fmt("%s: no jump atom found", label));
    double settled = 0.0;
    for (const JumpAtom& atom : decomp.atoms) settled = std::max(settled, atom.window_hi);

    double sup = 0.0;
    std::size_t contacts = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (regimes[i] != Regime::contact || traj.times[i] < settled) continue;
        ++contacts;
        sup = std::max(sup, std::abs(traj.positions[i] - oracles::decaying_x2(traj.times[i])));
    }
    ck.require(contacts >= 10, fmt("%s: only %zu contact samples", label, contacts));
    ck.require(sup <= 1e-2, fmt("%s: contact tracking error %.2e", label, sup));

    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double speed =
            (traj.positions[i + 1] - traj.positions[i]) / (traj.times[i + 1] - traj.times[i]);
        const double u = eval_fields(sc, traj.times[i], traj.positions[i]).u;
        if (speed < u - 1e-6) {
            ck.require(false, fmt("%s: speed %.3e below U - 1e-6 at t = %.4f", label, speed,
                                  traj.times[i]));
            break;
        }
    }
}

bool criterion4(RunSet& rs, std::string& detail) {
    Checker ck;
    check_contact_tracking(rs, rs.decay_projection(), "projection", ck);
    check_contact_tracking(rs, rs.decay_penalty(), "penalty", ck);
    detail = ck.failures;
    return ck.ok();
}

struct SuiteCase {
    std::string label;
    const Trajectory* traj;
    const Scenario* sc;
    const BoundsCertificate* cert;
    MultiplierOptions mopts;
};

std::vector<SuiteCase> all_runs(RunSet& rs) {
    std::vector<SuiteCase> cases;
    cases.push_back({"trivial penalty", &rs.trivial_penalty(), &rs.trivial(), &rs.trivial_cert(), {}});
    cases.push_back(
        {"trivial projection", &rs.trivial_projection(), &rs.trivial(), &rs.trivial_cert(), {}});
    cases.push_back({"band projection", &rs.band_projection(), &rs.band(), &rs.band_cert(), {}});
    MultiplierOptions band_mo;
    band_mo.jump_speed_factor = kBandSweepJumpFactor;
    for (double eps : kSweepEpsilons)
        cases.push_back({fmt("band penalty eps=%g", eps), &rs.band_penalty(eps), &rs.band(),
                         &rs.band_cert(), band_mo});
    MultiplierOptions decay_mo;
    decay_mo.jump_speed_factor = kDecayJumpFactor;
    cases.push_back(
        {"decay projection", &rs.decay_projection(), &rs.decay(), &rs.decay_cert(), decay_mo});
    cases.push_back({"decay penalty", &rs.decay_penalty(), &rs.decay(), &rs.decay_cert(), decay_mo});
    return cases;
}

void record_suite(const SuiteCase& rc, const BoundSuite& suite, const char* tag, Checker& ck) {
    for (const BoundEntry& entry : suite.entries)
        ck.require(entry.satisfied, fmt("%s %s: %s margin %.2e", rc.label.c_str(), tag,
                                        entry.name.c_str(), entry.margin));
}

bool criterion5(RunSet& rs, std::string& detail) {
    Checker ck;
    for (const SuiteCase& rc : all_runs(rs)) {
        if (admissible_window(*rc.cert)) {
            const std::vector<EstimateParams> pairs = sample_params(*rc.cert);
            ck.require(pairs.size() == 5, fmt("%s: %zu sampled pairs", rc.label.c_str(), pairs.size()));
            for (const EstimateParams& p : pairs) {
                const BoundSuite suite = run_bound_suite(*rc.traj, *rc.sc, *rc.cert, p, rc.mopts);
                record_suite(rc, suite, fmt("alpha=%.4f rho=%.4f", p.alpha, p.rho).c_str(), ck);
            }
        } else {
            const BoundSuite suite =
                run_bound_suite(*rc.traj, *rc.sc, *rc.cert, std::nullopt, rc.mopts);
            record_suite(rc, suite, "(window-free)", ck);
        }
    }
    detail = ck.failures;
    return ck.ok();
}

bool criterion6(RunSet& rs, std::string& detail) {
    Checker ck;
    struct EnergyCase {
        std::string label;
        const Trajectory* traj;
        const Scenario* sc;
        const BoundsCertificate* cert;
        PenaltyOptions opts;
    };
    std::vector<EnergyCase> cases;
    cases.push_back({"trivial", &rs.trivial_penalty(), &rs.trivial(), &rs.trivial_cert(),
                     PenaltyOptions{.epsilon = 1e-3, .rel_tol = 1e-8}});
    for (double eps : kSweepEpsilons)
        cases.push_back({fmt("band eps=%g", eps), &rs.band_penalty(eps), &rs.band(), &rs.band_cert(),
                         PenaltyOptions{.epsilon = eps}});
    cases.push_back({"decay", &rs.decay_penalty(), &rs.decay(), &rs.decay_cert(),
                     PenaltyOptions{.epsilon = 1e-4, .stop_at_xmax = true}});

    for (const EnergyCase& ec : cases) {
        const double alpha =
            admissible_window(*ec.cert) ? default_params(*ec.cert).alpha : ec.sc->gamma_star;
        const double coarse = energy_identity_residual(*ec.traj, *ec.sc, alpha, 1, 512);
        ck.require(coarse <= 1e-2, fmt("%s: residual %.3e above 1e-2", ec.label.c_str(), coarse));

        PenaltyOptions refined = ec.opts;
        refined.h_init = (refined.h_init > 0.0 ? refined.h_init : ec.sc->T / 1000.0) / 2.0;
        refined.stiff_factor = 0.1;
        const Trajectory fine = solve_penalized(*ec.sc, refined);
        const double halved = energy_identity_residual(fine, *ec.sc, alpha, 1, 1024);
        ck.require(halved <= 0.5 * coarse || halved <= 1e-9,
                   fmt("%s: residual %.3e -> %.3e under grid doubling", ec.label.c_str(), coarse,
                       halved));
    }
    detail = ck.failures;
    return ck.ok();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string payload_of(const fs::path& path) {
    const nlohmann::json doc = nlohmann::json::parse(slurp(path));
    return doc.at("payload").dump(2);
}

bool criterion7(RunSet& rs, std::string& detail) {
    Checker ck;
    (void)rs;
    const std::string cli = FREEFRONT_CLI_PATH;
    const std::string band = (fs::path(FREEFRONT_SCENARIO_DIR) / "static_band.json").string();
    const fs::path base = fs::temp_directory_path() / "freefront_acceptance";
    std::vector<fs::path> reps = {base / "rep1", base / "rep2"};
    for (const fs::path& dir : reps) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        const std::vector<std::string> commands = {
            cli + " solve " + band + " --method projection --step 0.008 --out " + dir.string(),
            cli + " solve " + band + " --method penalty --epsilon 1e-4 --out " + dir.string(),
            cli + " sweep " + band + " --epsilons 0.003,0.001 --jump-speed-factor 3 --out " +
                dir.string(),
        };
        for (const std::string& cmd : commands) {
            const int status = std::system((cmd + " > /dev/null").c_str());
            ck.require(status == 0, fmt("exit status %d from: %s", status, cmd.c_str()));
        }
    }
    if (ck.ok()) {
        for (const char* name : {"static_band.projection.csv", "static_band.penalty.csv"})
            ck.require(slurp(reps[0] / name) == slurp(reps[1] / name),
                       fmt("%s differs between repeats", name));
        for (const char* name : {"static_band.projection.report.json",
                                 "static_band.penalty.report.json", "static_band.sweep.json"})
            ck.require(payload_of(reps[0] / name) == payload_of(reps[1] / name),
                       fmt("%s payload differs between repeats", name));
    }
    detail = ck.failures;
    return ck.ok();
}

}  // namespace

int main(int argc, char** argv) {
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    struct Criterion {
        int number;
        const char* title;
        bool (*run)(RunSet&, std::string&);
    };
    const Criterion table[] = {
        {1, "inactive constraint", criterion1},
        {2, "band traversal jump", criterion2},
        {3, "violation scaling", criterion3},
        {4, "persistent contact tracking", criterion4},
        {5, "bound suite", criterion5},
        {6, "energy identity", criterion6},
        {7, "determinism", criterion7},
    };

    RunSet runs;
    bool all_ok = true;
    for (const Criterion& c : table) {
        if (only != 0 && c.number != only) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(runs, detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        if (ok)
            std::printf("ACCEPTANCE %d (%s): PASS\n", c.number, c.title);
        else
            std::printf("ACCEPTANCE %d (%s): FAIL (%s)\n", c.number, c.title, detail.c_str());
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
