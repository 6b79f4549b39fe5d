#include "freefront/penalty_solver.hpp"

#include <algorithm>
#include <cmath>

#include "freefront/errors.hpp"

namespace freefront {

double yosida_penalty(double z, double gamma_star, double epsilon) {
    if (!(epsilon > 0.0)) throw SchemaError("epsilon must be positive");
    return z > gamma_star ? 0.0 : (z - gamma_star) / epsilon;
}

double project_K(double z, double gamma_star) { return z > gamma_star ? z : gamma_star; }

namespace {

struct Rhs {
    const Scenario& sc;
    double epsilon;

    double operator()(double t, double L) const {
        FieldSample s = eval_fields(sc, t, L);
        return s.u - yosida_penalty(s.gamma, sc.gamma_star, epsilon);
    }
};

double rk4(const Rhs& f, double t, double y, double h) {
    double k1 = f(t, y);
    double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    double k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory solve_penalized(const Scenario& sc, const PenaltyOptions& opts) {
    sc.check_shape();
    if (!(opts.epsilon > 0.0)) throw SchemaError("epsilon must be positive");
    if (!(opts.rel_tol > 0.0)) throw SchemaError("rel_tol must be positive");
    if (!(opts.stiff_factor > 0.0)) throw SchemaError("stiff_factor must be positive");

    const double T = sc.T;
    const double h_max = opts.h_init > 0.0 ? opts.h_init : T / 1000.0;
    const double h_min = opts.h_min > 0.0 ? opts.h_min : 1e-12 * T;
    const double stiff_cap = opts.stiff_factor * opts.epsilon;
    const Rhs rhs{sc, opts.epsilon};

    Trajectory traj;
    traj.method = SolveMethod::penalty;
    traj.epsilon = opts.epsilon;

    double t = 0.0;
    double L = sc.L0;

    auto gamma_at = [&](double tt, double LL) { return sc.gamma.eval(std::clamp(tt, 0.0, T), std::max(LL, 0.0)); };
    auto push = [&](double tt, double LL) {
        traj.times.push_back(tt);
        traj.positions.push_back(LL);
        traj.mu.push_back(yosida_penalty(gamma_at(tt, LL), sc.gamma_star, opts.epsilon));
    };
    push(t, L);

    double h = h_max;
    const double t_end_slack = 1e-14 * std::max(1.0, T);

    while (t < T - t_end_slack) {
        double g_here = gamma_at(t, L) - sc.gamma_star;
        bool in_violation = g_here <= 0.0;
        double cap = in_violation ? std::min(h_max, stiff_cap) : h_max;
        h = std::min({h, cap, T - t});
        if (h < h_min) h = std::min(h_min, T - t);

        // step doubling: one full step against two half steps
        double y_full = rk4(rhs, t, L, h);
        double y_half = rk4(rhs, t, L, 0.5 * h);
        double y_two = rk4(rhs, t + 0.5 * h, y_half, 0.5 * h);
        double err = std::fabs(y_full - y_two) / 15.0;
        double tol = opts.rel_tol * std::max(1.0, std::fabs(L));

        if (err > tol) {
            if (h <= h_min * (1.0 + 1e-9))
                throw StepUnderflowError("step control underflow; local stiffness approximately " +
                                             std::to_string(1.0 / opts.epsilon),
                                         t, 1.0 / opts.epsilon);
            double shrink = std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
            h = std::max(h_min, h * shrink);
            continue;
        }

        double t_new = t + h;
        double L_new = y_two;
        double g_new = gamma_at(t_new, L_new) - sc.gamma_star;

        // refine a threshold crossing inside the accepted step so the contact
        // onset/offset lands on a sample
        if (g_here * g_new < 0.0 && h > 2.0 * h_min) {
            double lo = 0.0, hi = h;
            double L_hi = L_new;
            for (int it = 0; it < 80 && hi - lo > h_min; ++it) {
                double mid = 0.5 * (lo + hi);
                double L_mid = rk4(rhs, t, L, mid);
                double g_mid = gamma_at(t + mid, L_mid) - sc.gamma_star;
                if (g_here * g_mid < 0.0) {
                    hi = mid;
                    L_hi = L_mid;
                } else {
                    lo = mid;
                }
            }
            t_new = t + hi;
            L_new = L_hi;
            // crossing into the violation set: continue under the stiffness cap
            if (g_here > 0.0) h = std::min(h, stiff_cap);
        } else {
            double grow = (err > 0.0) ? std::min(4.0, std::max(0.5, 0.9 * std::pow(tol / err, 0.2)))
                                      : 4.0;
            h = std::min(h_max, h * grow);
        }

        if (opts.stop_at_xmax && L_new >= sc.X_max) {
            // land exactly on the domain edge
            double lo = 0.0, hi = t_new - t;
            double L_hi = L_new;
            for (int it = 0; it < 80 && hi - lo > h_min; ++it) {
                double mid = 0.5 * (lo + hi);
                double L_mid = rk4(rhs, t, L, mid);
                if (L_mid >= sc.X_max) {
                    hi = mid;
                    L_hi = L_mid;
                } else {
                    lo = mid;
                }
            }
            push(t + hi, L_hi);
            traj.truncation = Truncation{t + hi, "position reached X_max"};
            return traj;
        }

        t = t_new;
        L = L_new;
        push(t, L);
    }

    return traj;
}

}  // namespace freefront
