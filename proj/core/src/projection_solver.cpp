#include "freefront/projection_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "freefront/errors.hpp"

namespace freefront {

namespace {

struct Resolved {
    double h, scan, rtol;
};

Resolved resolve(const Scenario& sc, const ProjectionOptions& opts) {
    double h = opts.h > 0.0 ? opts.h : sc.T / 1e4;
    double scan = opts.scan_step > 0.0 ? opts.scan_step : (sc.X_max - sc.L0) / 1e4;
    double rtol = opts.root_tol > 0.0 ? opts.root_tol : scan / 100.0;
    if (!(h > 0.0) || !(scan > 0.0) || !(rtol > 0.0))
        throw SchemaError("projection step sizes must be positive");
    return {h, scan, rtol};
}

bool feasible(const Scenario& sc, double t, double x) {
    return sc.gamma.eval(t, x) >= sc.gamma_star;
}

double feasible_forward(const Scenario& sc, double t, double x0, double scan, double rtol) {
    if (feasible(sc, t, x0)) return x0;
    double lo = x0;
    for (;;) {
        double hi = lo + scan;
        bool last = hi >= sc.X_max;
        if (last) hi = sc.X_max;
        if (feasible(sc, t, hi)) {
            while (hi - lo > rtol) {
                double mid = 0.5 * (lo + hi);
                if (feasible(sc, t, mid))
                    hi = mid;
                else
                    lo = mid;
            }
            return hi;
        }
        if (last)
            throw NoFeasiblePointError("no feasible position in [x0, X_max] at t = " +
                                           std::to_string(t),
                                       t);
        lo = hi;
    }
}

}  // namespace

double forward_feasible_point(const Scenario& sc, double t, double x0,
                              const ProjectionOptions& opts) {
    sc.check_shape();
    if (x0 < sc.L0 - 1e-12 * std::max(1.0, sc.X_max))
        throw SchemaError("forward search must start at or beyond L0");
    Resolved r = resolve(sc, opts);
    return feasible_forward(sc, t, std::max(x0, sc.L0), r.scan, r.rtol);
}

Trajectory solve_projected(const Scenario& sc, const ProjectionOptions& opts) {
    sc.check_shape();
    Resolved r = resolve(sc, opts);

    Trajectory traj;
    traj.method = SolveMethod::projection;
    traj.step = r.h;

    double L = sc.L0;

    // an infeasible start is corrected immediately; a large correction is an
    // atom anchored at t = 0
    if (!feasible(sc, 0.0, L)) {
        double L_fixed;
        try {
            L_fixed = feasible_forward(sc, 0.0, L, r.scan, r.rtol);
        } catch (const NoFeasiblePointError&) {
            if (!opts.allow_truncation) throw;
            traj.times.push_back(0.0);
            traj.positions.push_back(L);
            traj.mu.push_back(0.0);
            traj.truncation = Truncation{0.0, "no feasible position ahead of the front"};
            return traj;
        }
        if (L_fixed - L > r.scan)
            traj.atoms.push_back({0.0, L_fixed - L, -(L_fixed - L), 0.0, 0.0});
        L = L_fixed;
    }

    traj.times.push_back(0.0);
    traj.positions.push_back(L);
    traj.mu.push_back(0.0);

    std::size_t n_steps = static_cast<std::size_t>(std::ceil(sc.T / r.h - 1e-9));
    for (std::size_t n = 0; n < n_steps; ++n) {
        double t0 = traj.times.back();
        double t1 = std::min(sc.T, r.h * (n + 1));
        double dt = t1 - t0;
        double u0 = sc.velocity.eval(t0, L);
        double pred = L + dt * u0;

        double L1 = pred;
        if (!feasible(sc, t1, pred)) {
            try {
                L1 = feasible_forward(sc, t1, pred, r.scan, r.rtol);
            } catch (const NoFeasiblePointError& e) {
                if (!opts.allow_truncation) throw;
                traj.truncation = Truncation{e.t, "no feasible position ahead of the front"};
                return traj;
            }
            double corr = L1 - pred;
            if (corr > r.scan) {
                // the onset instant is where the predictor segment crosses the
                // threshold, not the grid point where the catch-up is applied
                double tau = t1;
                double g0 = sc.gamma.eval(t0, L) - sc.gamma_star;
                if (g0 > 0.0) {
                    double lo = t0, hi = t1;
                    for (int it = 0; it < 60 && hi - lo > 1e-9 * r.h; ++it) {
                        double mid = 0.5 * (lo + hi);
                        double xm = L + (mid - t0) * u0;
                        if (sc.gamma.eval(mid, xm) - sc.gamma_star < 0.0)
                            hi = mid;
                        else
                            lo = mid;
                    }
                    tau = hi;
                } else {
                    tau = t0;
                }
                traj.atoms.push_back({tau, corr, -corr, t0, t1});
            }
        }

        if (L1 != pred) traj.mu.back() = u0 - (L1 - L) / dt;  // multiplier of the step departing t0
        traj.times.push_back(t1);
        traj.positions.push_back(L1);
        traj.mu.push_back(0.0);
        L = L1;
    }

    return traj;
}

}  // namespace freefront
