#include "freefront/field_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "freefront/errors.hpp"

namespace freefront {

FieldSpec FieldSpec::constant(double v) {
    FieldSpec f;
    f.kind = FieldKind::constant;
    f.value = v;
    return f;
}

FieldSpec FieldSpec::affine(double a0, double a1) {
    FieldSpec f;
    f.kind = FieldKind::affine_t;
    f.a0 = a0;
    f.a1 = a1;
    return f;
}

FieldSpec FieldSpec::gauss_band(double a0, double a1, double gamma0) {
    FieldSpec f;
    f.kind = FieldKind::gauss_band;
    f.a0 = a0;
    f.a1 = a1;
    f.gamma0 = gamma0;
    return f;
}

FieldSpec FieldSpec::from_formula(const std::string& text) {
    FieldSpec f;
    f.kind = FieldKind::expression;
    f.formula = Expression::parse(text);
    f.formula_text = text;
    return f;
}

double FieldSpec::eval(double t, double x) const {
    switch (kind) {
        case FieldKind::constant: return value;
        case FieldKind::affine_t: return a0 + a1 * t;
        case FieldKind::gauss_band: return a0 + a1 * t - 2.0 * gamma0 * x * std::exp(-x * x);
        case FieldKind::expression: return formula->evaluate(t, x);
    }
    return 0.0;
}

double FieldSpec::eval_dt(double t, double x, double T) const {
    switch (kind) {
        case FieldKind::constant: return 0.0;
        case FieldKind::affine_t:
        case FieldKind::gauss_band: return a1;
        case FieldKind::expression: {
            double ht = 1e-6 * std::max(1.0, T);
            double lo = std::max(0.0, t - ht);
            double hi = std::min(T, t + ht);
            if (hi <= lo) return 0.0;
            return (formula->evaluate(hi, x) - formula->evaluate(lo, x)) / (hi - lo);
        }
    }
    return 0.0;
}

void Scenario::check_shape() const {
    if (!(gamma_star > 0.0)) throw SchemaError("gamma_star must be positive");
    if (!(L0 >= 0.0)) throw SchemaError("L0 must be nonnegative");
    if (!(T > 0.0)) throw SchemaError("T must be positive");
    if (!(X_max > L0)) throw SchemaError("X_max must exceed L0");
    if (!std::isfinite(gamma_star) || !std::isfinite(L0) || !std::isfinite(T) ||
        !std::isfinite(X_max))
        throw SchemaError("scenario scalars must be finite");
}

FieldSample eval_fields(const Scenario& sc, double t, double x) {
    double t_slack = 1e-9 * std::max(1.0, sc.T);
    double x_slack = 1e-12 * std::max(1.0, sc.X_max);
    if (x < -x_slack)
        throw EvaluationDomainError("field evaluation at negative position", t, x);
    if (t < -t_slack || t > sc.T + t_slack)
        throw EvaluationDomainError("field evaluation outside the time horizon", t, x);
    double tc = std::clamp(t, 0.0, sc.T);
    double xc = std::max(x, 0.0);
    return {sc.velocity.eval(tc, xc), sc.gamma.eval(tc, xc), sc.gamma.eval_dt(tc, xc, sc.T)};
}

double BoundsCertificate::checked_u_lip() const {
    return u_lip.provenance == Provenance::declared ? u_lip.value : u_lip.value * safety_factor;
}
double BoundsCertificate::checked_u0_max() const {
    return u0_max.provenance == Provenance::declared ? u0_max.value : u0_max.value * safety_factor;
}
double BoundsCertificate::checked_gamma_max() const {
    return gamma_max.provenance == Provenance::declared ? gamma_max.value
                                                        : gamma_max.value * safety_factor;
}
double BoundsCertificate::checked_c_gamma() const {
    return c_gamma.provenance == Provenance::declared ? c_gamma.value
                                                      : c_gamma.value * safety_factor;
}
double BoundsCertificate::checked_eta_star() const {
    // eta* is an infimum: sampling overestimates it, so the safe adjustment is downward.
    return eta_star.provenance == Provenance::declared ? eta_star.value
                                                       : eta_star.value / safety_factor;
}

double estimate_eta_star(const Scenario& sc, const GridSpec& grid, EtaAverage average) {
    sc.check_shape();
    if (average == EtaAverage::literal && sc.L0 > 0.0)
        throw DegenerateAverageError(
            "the literal running average (1/y) * integral from L0 degenerates for L0 > 0; "
            "use the shifted average normalized by (y - L0)");
    if (grid.t_samples < 2 || grid.x_samples < 2)
        throw SchemaError("grid must have at least two samples per axis");

    // sigma grid refines the y grid fourfold so every y lands on a quadrature node
    int ny = grid.x_samples - 1;
    int refine = 4;
    int n_sigma = ny * refine;
    double span = sc.X_max - sc.L0;
    double dsig = span / n_sigma;

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> vals(static_cast<std::size_t>(n_sigma) + 1);
    for (int it = 0; it < grid.t_samples; ++it) {
        double t = sc.T * it / (grid.t_samples - 1);
        for (int k = 0; k <= n_sigma; ++k)
            vals[k] = sc.gamma.eval(t, sc.L0 + dsig * k);
        double acc = 0.0;
        for (int k = 1; k <= n_sigma; ++k) {
            acc += 0.5 * (vals[k - 1] + vals[k]) * dsig;
            if (k % refine != 0) continue;
            double y = sc.L0 + dsig * k;
            double denom = (average == EtaAverage::literal) ? y : (y - sc.L0);
            best = std::min(best, acc / denom);
        }
    }
    return best;
}

namespace {

void check_declared(std::vector<HypothesisIssue>& issues, const char* name, double declared,
                    double sampled, double t, double x) {
    double slack = 1e-9 * std::max(1.0, std::fabs(declared));
    if (sampled > declared + slack)
        issues.push_back({std::string(name) + " exceeded by samples", t, x, sampled,
                          "declared " + std::to_string(declared)});
}

}  // namespace

ValidationResult validate_hypotheses(const Scenario& sc, const GridSpec& grid,
                                     EtaAverage average) {
    sc.check_shape();
    if (grid.t_samples < 2 || grid.x_samples < 2)
        throw SchemaError("grid must have at least two samples per axis");

    ValidationResult res;
    std::vector<HypothesisIssue>& issues = res.violations;

    int nt = grid.t_samples, nx = grid.x_samples;
    double u_min = std::numeric_limits<double>::infinity();
    double u_min_t = 0, u_min_x = 0;
    double g_min = std::numeric_limits<double>::infinity();
    double g_min_t = 0, g_min_x = 0;
    double g_max = -std::numeric_limits<double>::infinity();
    double gt_max = 0.0;
    double u_lip = 0.0;
    double u0_max = 0.0;

    double dx = sc.X_max / (nx - 1);
    for (int it = 0; it < nt; ++it) {
        double t = sc.T * it / (nt - 1);
        double u_prev = 0.0;
        for (int ix = 0; ix < nx; ++ix) {
            double x = dx * ix;
            FieldSample s = eval_fields(sc, t, x);
            if (s.u < u_min) { u_min = s.u; u_min_t = t; u_min_x = x; }
            if (s.gamma < g_min) { g_min = s.gamma; g_min_t = t; g_min_x = x; }
            g_max = std::max(g_max, s.gamma);
            gt_max = std::max(gt_max, std::fabs(s.gamma_t));
            if (ix > 0) u_lip = std::max(u_lip, std::fabs(s.u - u_prev) / dx);
            u_prev = s.u;
            if (ix == 0) u0_max = std::max(u0_max, s.u);
        }
    }

    if (u_min < -1e-12)
        issues.push_back({"U >= 0", u_min_t, u_min_x, u_min, "velocity field dips negative"});
    if (g_min < -1e-12)
        issues.push_back({"Gamma >= 0", g_min_t, g_min_x, g_min, "cohesion field dips negative"});

    BoundsCertificate& cert = res.certificate;
    cert.gamma_star = sc.gamma_star;
    cert.eta_average = average;

    const DeclaredBounds empty{};
    const DeclaredBounds& decl = sc.declared ? *sc.declared : empty;

    auto fill = [&](CertValue& slot, const std::optional<double>& declared, double sampled,
                    const char* name) {
        if (declared) {
            slot = {*declared, Provenance::declared};
            check_declared(issues, name, *declared, sampled, 0.0, 0.0);
        } else {
            slot = {sampled, Provenance::estimated};
        }
    };
    fill(cert.u_lip, decl.u_lip, u_lip, "U_Lip");
    fill(cert.u0_max, decl.u0_max, u0_max, "U_0max");
    fill(cert.gamma_max, decl.gamma_max, g_max, "Gamma_max");
    fill(cert.c_gamma, decl.c_gamma, gt_max, "C_Gamma");

    if (decl.eta_star) {
        cert.eta_star = {*decl.eta_star, Provenance::declared};
    } else {
        cert.eta_star = {estimate_eta_star(sc, grid, average), Provenance::estimated};
    }

    if (!(cert.checked_eta_star() > sc.gamma_star))
        issues.push_back({"eta_star > gamma_star", 0.0, 0.0, cert.checked_eta_star(),
                          "running-average infimum does not clear the threshold"});

    return res;
}

}  // namespace freefront
