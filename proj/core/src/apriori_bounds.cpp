#include "freefront/apriori_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "freefront/errors.hpp"
#include "freefront/penalty_solver.hpp"

namespace freefront {
namespace {

double slack_for(double bound) { return 1e-9 * std::max(1.0, std::abs(bound)); }

BoundEntry make_entry(std::string name, double observed, double bound, std::string note = {}) {
    BoundEntry e;
    e.name = std::move(name);
    e.observed = observed;
    e.bound = bound;
    e.margin = bound - observed;
    e.satisfied = e.margin >= -slack_for(bound);
    e.note = std::move(note);
    return e;
}

double integral_of_gamma(const Scenario& sc, double t, double upper, int panels) {
    if (upper <= sc.L0) return 0.0;
    const double h = (upper - sc.L0) / panels;
    double acc = 0.5 * (eval_fields(sc, t, sc.L0).gamma + eval_fields(sc, t, upper).gamma);
    for (int k = 1; k < panels; ++k) acc += eval_fields(sc, t, sc.L0 + k * h).gamma;
    return acc * h;
}

double integral_of_gamma_dt(const Scenario& sc, double t, double upper, int panels) {
    if (upper <= sc.L0) return 0.0;
    const double h = (upper - sc.L0) / panels;
    double acc = 0.5 * (sc.gamma.eval_dt(t, sc.L0, sc.T) + sc.gamma.eval_dt(t, upper, sc.T));
    for (int k = 1; k < panels; ++k) acc += sc.gamma.eval_dt(t, sc.L0 + k * h, sc.T);
    return acc * h;
}

}  // namespace

bool admissible_window(const BoundsCertificate& cert) {
    return cert.checked_eta_star() > cert.gamma_star;
}

void validate_params(const BoundsCertificate& cert, const EstimateParams& params) {
    const double eta = cert.checked_eta_star();
    if (!(params.alpha > cert.gamma_star) || !(params.alpha < eta))
        throw InvalidEstimateParamsError(
            "alpha = " + std::to_string(params.alpha) + " outside the window (" +
            std::to_string(cert.gamma_star) + ", " + std::to_string(eta) + ")");
    if (!(params.rho > 0.0) || params.rho > params.alpha - cert.gamma_star)
        throw InvalidEstimateParamsError("rho = " + std::to_string(params.rho) +
                                         " outside (0, alpha - gamma_star]");
}

EstimateParams default_params(const BoundsCertificate& cert) {
    if (!admissible_window(cert))
        throw InvalidEstimateParamsError(
            "no admissible estimate parameters: eta* = " +
            std::to_string(cert.checked_eta_star()) + " does not exceed gamma* = " +
            std::to_string(cert.gamma_star));
    EstimateParams p;
    p.alpha = cert.gamma_star + 0.75 * (cert.checked_eta_star() - cert.gamma_star);
    p.rho = 0.5 * (p.alpha - cert.gamma_star);
    return p;
}

std::vector<EstimateParams> sample_params(const BoundsCertificate& cert) {
    if (!admissible_window(cert))
        throw InvalidEstimateParamsError("no admissible estimate parameters: window is empty");
    const double width = cert.checked_eta_star() - cert.gamma_star;
    const double alpha_frac[] = {0.2, 0.4, 0.6, 0.8, 0.95};
    const double rho_frac[] = {1.0, 0.75, 0.5, 0.25, 0.5};
    std::vector<EstimateParams> out;
    for (int k = 0; k < 5; ++k) {
        EstimateParams p;
        p.alpha = cert.gamma_star + alpha_frac[k] * width;
        p.rho = rho_frac[k] * (p.alpha - cert.gamma_star);
        out.push_back(p);
    }
    return out;
}

ProofConstants constants_C1_C2(const BoundsCertificate& cert, const EstimateParams& params,
                               double T) {
    validate_params(cert, params);
    ProofConstants c;
    c.C1 = (cert.checked_gamma_max() + params.alpha) * cert.checked_u0_max() * T;
    c.C2 = (cert.checked_gamma_max() + params.alpha) * cert.checked_u_lip() + cert.checked_c_gamma();
    return c;
}

BoundEntry gronwall_check(const Trajectory& traj, const BoundsCertificate& cert,
                          const EstimateParams& params) {
    const double T = traj.times.back();
    const auto [C1, C2] = constants_C1_C2(cert, params, T);
    const double d = cert.checked_eta_star() - params.alpha;
    double worst_ratio = 0.0;
    double worst_obs = 0.0;
    double worst_bound = C1 / d;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double envelope = C1 / d * std::exp(C2 * traj.times[i] / d);
        const double ratio = traj.positions[i] / envelope;
        if (ratio >= worst_ratio) {
            worst_ratio = ratio;
            worst_obs = traj.positions[i];
            worst_bound = envelope;
        }
    }
    return make_entry("gronwall_envelope", worst_obs, worst_bound,
                      "front position against the exponential envelope, worst sample");
}

BoundEntry bv_seminorm_check(const Trajectory& traj, const BoundsCertificate& cert,
                             const EstimateParams& params) {
    const double T = traj.times.back();
    const auto [C1, C2] = constants_C1_C2(cert, params, T);
    const double d = cert.checked_eta_star() - params.alpha;
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i)
        tv += std::abs(traj.positions[i + 1] - traj.positions[i]);
    const double growth = std::exp(C2 * T / d);
    const double third = C2 > 0.0 ? cert.checked_u_lip() * (C1 / C2) * (growth - 1.0) : 0.0;
    const double bound = cert.checked_u0_max() * T + (C1 / params.rho) * growth + third;
    return make_entry("bv_seminorm", tv, bound, "total variation of the sampled path");
}

std::vector<BoundEntry> penalty_l1_check(const Trajectory& traj, const Scenario& sc,
                                         const BoundsCertificate& cert,
                                         const EstimateParams& params) {
    if (traj.method != SolveMethod::penalty)
        throw WrongMethodError("the multiplier L1 bound applies to penalty runs only");
    const double T = traj.times.back();
    const auto [C1, C2] = constants_C1_C2(cert, params, T);
    const double d = cert.checked_eta_star() - params.alpha;
    const double growth = std::exp(C2 * T / d);

    double l1 = 0.0;
    double pairing = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double dt = traj.times[i + 1] - traj.times[i];
        const double m0 = traj.mu[i];
        const double m1 = traj.mu[i + 1];
        l1 += 0.5 * (std::abs(m0) + std::abs(m1)) * dt;
        const double z0 = eval_fields(sc, traj.times[i], traj.positions[i]).gamma;
        const double z1 = eval_fields(sc, traj.times[i + 1], traj.positions[i + 1]).gamma;
        pairing += 0.5 * (m0 * (z0 - params.alpha) + m1 * (z1 - params.alpha)) * dt;
    }

    std::vector<BoundEntry> out;
    out.push_back(make_entry("multiplier_l1", l1, (C1 / params.rho) * growth,
                             "L1 mass of the penalty multiplier"));
    BoundEntry upper = make_entry("pairing_upper", pairing, C1 * growth,
                                  "integral of mu (Gamma - alpha)");
    BoundEntry lower = make_entry("pairing_lower", -pairing, 0.0,
                                  "nonnegativity of the pairing integral");
    out.push_back(upper);
    out.push_back(lower);
    return out;
}

ViolationMetrics violation_metrics(const Trajectory& traj, const Scenario& sc) {
    if (traj.method != SolveMethod::penalty)
        throw WrongMethodError("violation metrics apply to penalty runs only");
    ViolationMetrics m;
    std::vector<double> neg(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double gap = eval_fields(sc, traj.times[i], traj.positions[i]).gamma - sc.gamma_star;
        neg[i] = std::max(0.0, -gap);
        m.sup_violation = std::max(m.sup_violation, neg[i]);
    }
    for (std::size_t i = 0; i + 1 < traj.size(); ++i)
        m.l2_sq += 0.5 * (neg[i] * neg[i] + neg[i + 1] * neg[i + 1]) *
                   (traj.times[i + 1] - traj.times[i]);
    return m;
}

BoundEntry violation_check(const Trajectory& traj, const Scenario& sc, double c_t) {
    const ViolationMetrics m = violation_metrics(traj, sc);
    if (c_t > 0.0)
        return make_entry("violation_l2", m.l2_sq, c_t * traj.epsilon,
                          "L2 violation integral against the sweep-fitted constant");
    BoundEntry e;
    e.name = "violation_l2";
    e.observed = m.l2_sq;
    e.bound = std::numeric_limits<double>::quiet_NaN();
    e.margin = std::numeric_limits<double>::quiet_NaN();
    e.satisfied = true;
    e.note = "uncertified; the linear-in-epsilon rate is certified by the sweep";
    return e;
}

BoundEntry infimum_check(const Trajectory& traj, const Scenario& sc,
                         const BoundsCertificate& cert, int sigma_panels) {
    const double eta = cert.checked_eta_star();
    double worst = 0.0;  // max of eta * weight - j, should stay <= 0
    double worst_j = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double v = traj.positions[i];
        const double weight = cert.eta_average == EtaAverage::shifted ? v - sc.L0 : v;
        if (weight <= 0.0) continue;
        const double j = integral_of_gamma(sc, traj.times[i], v, sigma_panels);
        const double excess = eta * weight - j;
        if (excess > worst) {
            worst = excess;
            worst_j = j;
        }
    }
    const double scale = std::max(1.0, cert.checked_gamma_max() * std::max(1.0, sc.X_max));
    BoundEntry e;
    e.name = "running_average_infimum";
    e.observed = worst;
    e.bound = 0.0;
    e.margin = -worst;
    e.satisfied = worst <= 1e-9 * scale;
    e.note = "max over samples of eta* weight - integral of Gamma (worst integral " +
             std::to_string(worst_j) + ")";
    return e;
}

BoundEntry sign_check(const Trajectory& traj, const MultiplierDecomposition& decomp) {
    double worst = 0.0;
    for (double m : traj.mu) worst = std::max(worst, m);
    double density_scale = 1.0;
    for (std::size_t i = 0; i < decomp.mu_a.size(); ++i) {
        if (decomp.excluded[i]) continue;
        worst = std::max(worst, decomp.mu_a[i]);
        density_scale = std::max(density_scale, std::abs(decomp.mu_a[i]));
    }
    for (const JumpAtom& atom : decomp.atoms) worst = std::max(worst, atom.mass);
    BoundEntry e;
    e.name = "multiplier_sign";
    e.observed = worst;
    e.bound = 0.0;
    e.margin = -worst;
    e.satisfied = worst <= 1e-10 * density_scale;
    e.note = "largest multiplier sample, density sample, or atom mass";
    return e;
}

BoundEntry complementarity_check(const Trajectory& traj, const Scenario& sc,
                                 const MultiplierDecomposition& decomp,
                                 const BoundsCertificate& cert) {
    const double residual = complementarity_residual(decomp, traj, sc);
    double sup_mu = 0.0;
    for (double m : traj.mu) sup_mu = std::max(sup_mu, std::abs(m));
    const double bound = 1e-3 * cert.checked_gamma_max() * sup_mu;
    BoundEntry e;
    e.name = "complementarity";
    e.observed = residual;
    e.bound = bound;
    e.margin = bound - residual;
    e.satisfied = residual <= bound + 1e-9 * cert.checked_gamma_max();
    e.note = "sup of |mu_a (Gamma - gamma_star)| off jump windows";
    return e;
}

double energy_identity_residual(const Trajectory& traj, const Scenario& sc, double alpha,
                                int refine, int sigma_panels) {
    if (traj.method != SolveMethod::penalty)
        throw WrongMethodError("the energy identity applies to penalty runs only");
    check_trajectory(traj, sc);
    if (refine < 1) refine = 1;
    const int panels = sigma_panels * refine;

    std::vector<double> ts, xs;
    ts.reserve(traj.size() * refine);
    xs.reserve(traj.size() * refine);
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        for (int k = 0; k < refine; ++k) {
            const double w = static_cast<double>(k) / refine;
            ts.push_back(traj.times[i] + w * (traj.times[i + 1] - traj.times[i]));
            xs.push_back(traj.positions[i] + w * (traj.positions[i + 1] - traj.positions[i]));
        }
    }
    ts.push_back(traj.times.back());
    xs.push_back(traj.positions.back());

    const std::size_t n = ts.size();
    std::vector<double> pair_mu(n), pair_u(n), inner_dt(n);
    for (std::size_t i = 0; i < n; ++i) {
        const FieldSample f = eval_fields(sc, ts[i], xs[i]);
        const double mu = yosida_penalty(f.gamma, sc.gamma_star, traj.epsilon);
        pair_mu[i] = mu * (f.gamma - alpha);
        pair_u[i] = f.u * (f.gamma - alpha);
        inner_dt[i] = integral_of_gamma_dt(sc, ts[i], xs[i], panels);
    }
    double D = 0.0, E = 0.0, B = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = ts[i + 1] - ts[i];
        D += 0.5 * (pair_mu[i] + pair_mu[i + 1]) * dt;
        E += 0.5 * (pair_u[i] + pair_u[i + 1]) * dt;
        B += 0.5 * (inner_dt[i] + inner_dt[i + 1]) * dt;
    }
    const double A = integral_of_gamma(sc, ts.back(), xs.back(), panels);
    const double C = alpha * (xs.back() - sc.L0);

    const double residual = std::abs(A - B - C + D - E);
    const double scale = std::max({std::abs(A), std::abs(B), std::abs(C), std::abs(D),
                                   std::abs(E), 1e-300});
    return residual / scale;
}

BoundSuite run_bound_suite(const Trajectory& traj, const Scenario& sc,
                           const BoundsCertificate& cert,
                           std::optional<EstimateParams> params,
                           const MultiplierOptions& mopts) {
    BoundSuite suite;
    if (!params && admissible_window(cert)) params = default_params(cert);
    suite.params = params;

    const MultiplierDecomposition decomp = reconstruct_multiplier(traj, sc, cert, mopts);
    if (params) {
        validate_params(cert, *params);
        suite.entries.push_back(gronwall_check(traj, cert, *params));
        suite.entries.push_back(bv_seminorm_check(traj, cert, *params));
        if (traj.method == SolveMethod::penalty)
            for (BoundEntry& e : penalty_l1_check(traj, sc, cert, *params))
                suite.entries.push_back(std::move(e));
    }
    suite.entries.push_back(infimum_check(traj, sc, cert));
    suite.entries.push_back(sign_check(traj, decomp));
    suite.entries.push_back(complementarity_check(traj, sc, decomp, cert));

    for (const BoundEntry& e : suite.entries) suite.all_satisfied = suite.all_satisfied && e.satisfied;
    return suite;
}

}  // namespace freefront
