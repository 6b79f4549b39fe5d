#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freefront/expression.hpp"

namespace freefront {

/**
 * Scenario data for the constrained front problem
 *
 *     dL/dt + mu = U(t, L(t)),   mu in the normal cone of {Gamma >= Gamma*}
 *                                 evaluated at Gamma(t, L(t)),
 *     L(0) = L0,
 *
 * posed on t in [0, T] with positions in [L0, X_max].  Gamma is the cohesion
 * field, U the driving velocity, Gamma* > 0 the cohesion threshold.  The
 * front moves with speed U while cohesion at the front exceeds the
 * threshold, and at least U (catching up to the feasible set) on contact.
 */

/// Built-in field families plus free-form expressions in t and x.
enum class FieldKind { constant, affine_t, gauss_band, expression };

/**
 * One scalar field of a scenario.
 *
 * constant:    value
 * affine-in-t: a0 + a1*t
 * gauss-band:  (a0 + a1*t) - 2*gamma0*x*exp(-x^2)
 * expression:  arbitrary formula in t, x
 */
struct FieldSpec {
    FieldKind kind = FieldKind::constant;
    double value = 0.0;                    // constant
    double a0 = 0.0, a1 = 0.0;             // affine_t, gauss_band
    double gamma0 = 0.0;                   // gauss_band
    std::optional<Expression> formula;     // expression
    std::string formula_text;

    static FieldSpec constant(double v);
    static FieldSpec affine(double a0, double a1);
    static FieldSpec gauss_band(double a0, double a1, double gamma0);
    static FieldSpec from_formula(const std::string& text);

    double eval(double t, double x) const;

    /** Time derivative; analytic for built-in families, central difference
     *  with step 1e-6*max(1,T) (one-sided at the horizon ends) otherwise. */
    double eval_dt(double t, double x, double T) const;
};

/// Constants declared by the scenario author; sampled estimates fill the rest.
struct DeclaredBounds {
    std::optional<double> u_lip;      // Lipschitz constant of U in x
    std::optional<double> u0_max;     // sup_t U(t, 0)
    std::optional<double> gamma_max;  // sup Gamma
    std::optional<double> c_gamma;    // sup |dGamma/dt|
    std::optional<double> eta_star;   // running-average infimum of Gamma
};

struct Scenario {
    FieldSpec gamma;
    FieldSpec velocity;
    double gamma_star = 0.0;
    double L0 = 0.0;
    double T = 0.0;
    double X_max = 0.0;
    std::optional<DeclaredBounds> declared;

    /// Structural validity: gamma_star > 0, L0 >= 0, T > 0, X_max > L0.
    void check_shape() const;  // throws SchemaError
};

/// Joint sample of both fields at a point.
struct FieldSample {
    double u;
    double gamma;
    double gamma_t;
};

/** Evaluates U, Gamma and dGamma/dt at (t, x).  Throws EvaluationDomainError
 *  for x < 0 or t outside [0, T] (modulo a roundoff allowance). */
FieldSample eval_fields(const Scenario& sc, double t, double x);

/// Where a certificate constant came from.
enum class Provenance { declared, estimated };

struct CertValue {
    double value = 0.0;
    Provenance provenance = Provenance::estimated;
};

/// Convention for the running average behind eta*.
enum class EtaAverage {
    literal,  // (1/y) * integral_{L0}^{y} Gamma; requires L0 == 0
    shifted   // (1/(y-L0)) * integral_{L0}^{y} Gamma
};

/**
 * Verified constants of a scenario.  Stored values are the raw declared or
 * sampled numbers; checks consume the safety-adjusted accessors, which
 * inflate sampled suprema by safety_factor and deflate the sampled infimum
 * eta* by the same factor (declared values pass through unchanged).
 */
struct BoundsCertificate {
    CertValue u_lip, u0_max, gamma_max, c_gamma, eta_star;
    double gamma_star = 0.0;
    double safety_factor = 1.05;
    EtaAverage eta_average = EtaAverage::literal;

    double checked_u_lip() const;
    double checked_u0_max() const;
    double checked_gamma_max() const;
    double checked_c_gamma() const;
    double checked_eta_star() const;

    /// Admissible window for estimate parameters is (gamma_star, checked_eta_star()).
    bool valid() const { return checked_eta_star() > gamma_star && gamma_star > 0.0; }
};

/// One failed hypothesis with a witness point.
struct HypothesisIssue {
    std::string hypothesis;
    double t = 0.0;
    double x = 0.0;
    double observed = 0.0;
    std::string detail;
};

struct ValidationResult {
    BoundsCertificate certificate;
    std::vector<HypothesisIssue> violations;
    bool valid() const { return violations.empty(); }
};

/// Sampling resolution for validation and eta* estimation.
struct GridSpec {
    int t_samples = 401;
    int x_samples = 401;
};

/**
 * Estimates eta* = inf over sampled t and y > L0 of the running average of
 * Gamma(t, .) from L0 to y.  The integral uses a composite trapezoid with
 * 4*(x_samples-1) panels aligned with the y grid.  The literal average with
 * L0 > 0 is degenerate and raises DegenerateAverageError; pass
 * EtaAverage::shifted to normalize by (y - L0) instead.
 */
double estimate_eta_star(const Scenario& sc, const GridSpec& grid = {},
                         EtaAverage average = EtaAverage::literal);

/**
 * Samples U >= 0, 0 <= Gamma, |dGamma/dt| on [0,T] x [0,X_max], estimates the
 * undeclared constants, cross-checks any declared ones against the samples,
 * and verifies eta* > gamma_star > 0.  Never throws on a merely invalid
 * scenario; every failure is returned as a HypothesisIssue.
 */
ValidationResult validate_hypotheses(const Scenario& sc, const GridSpec& grid = {},
                                     EtaAverage average = EtaAverage::literal);

}  // namespace freefront
