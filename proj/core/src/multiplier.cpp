#include "freefront/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "freefront/errors.hpp"

namespace freefront {
namespace {

struct Window {
    std::size_t first;
    std::size_t last;  // inclusive sample range
};

double jump_speed_threshold(const Scenario& sc, const BoundsCertificate& cert,
                            const MultiplierOptions& opts) {
    return opts.jump_speed_factor * (cert.checked_u0_max() + cert.checked_u_lip() * sc.X_max);
}

std::size_t index_of_time(const Trajectory& traj, double t) {
    auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t - 1e-12 * (1.0 + std::abs(t)));
    if (it == traj.times.end()) return traj.times.size() - 1;
    return static_cast<std::size_t>(it - traj.times.begin());
}

std::vector<Window> locate_windows(const Trajectory& traj, const Scenario& sc,
                                   const BoundsCertificate& cert, const MultiplierOptions& opts) {
    std::vector<Window> windows;
    const std::size_t n = traj.size();
    if (traj.method == SolveMethod::projection) {
        for (const JumpAtom& atom : traj.atoms) {
            if (atom.window_hi <= atom.window_lo) {
                windows.push_back({0, 0});
                continue;
            }
            std::size_t hi = index_of_time(traj, atom.window_hi);
            std::size_t lo = index_of_time(traj, atom.window_lo);
            if (traj.times[lo] <= atom.window_lo + 1e-12 * (1.0 + atom.window_lo) && lo + 1 <= hi)
                ++lo;
            windows.push_back({lo, hi});
        }
        return windows;
    }
    const double thresh = jump_speed_threshold(sc, cert, opts);
    std::size_t i = 0;
    while (i + 1 < n) {
        const double speed =
            (traj.positions[i + 1] - traj.positions[i]) / (traj.times[i + 1] - traj.times[i]);
        if (speed > thresh) {
            std::size_t j = i;
            while (j + 1 < n) {
                const double s =
                    (traj.positions[j + 1] - traj.positions[j]) / (traj.times[j + 1] - traj.times[j]);
                if (s <= thresh) break;
                ++j;
            }
            windows.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return windows;
}

std::vector<JumpAtom> penalty_atoms(const Trajectory& traj, const Scenario& sc,
                                    const std::vector<Window>& windows) {
    std::vector<JumpAtom> atoms;
    for (const Window& w : windows) {
        const double lo = traj.times[w.first];
        const double hi = traj.times[w.last];
        const double jump = traj.positions[w.last] - traj.positions[w.first];
        double transported = 0.0;
        for (std::size_t k = w.first; k < w.last; ++k) {
            const double u0 = eval_fields(sc, traj.times[k], traj.positions[k]).u;
            const double u1 = eval_fields(sc, traj.times[k + 1], traj.positions[k + 1]).u;
            transported += 0.5 * (u0 + u1) * (traj.times[k + 1] - traj.times[k]);
        }
        atoms.push_back({lo, jump, -jump + transported, lo, hi});
    }
    return atoms;
}

void check_atom_support(const Trajectory& traj, const Scenario& sc, const BoundsCertificate& cert,
                        const MultiplierOptions& opts, const std::vector<JumpAtom>& atoms,
                        const std::vector<Window>& windows) {
    const double ctol = resolved_contact_tol(cert, opts);
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        const JumpAtom& atom = atoms[a];
        if (atom.time == 0.0 && atom.window_hi <= atom.window_lo) continue;  // initial catch-up
        double pre_position;
        double tol = ctol;
        if (traj.method == SolveMethod::projection) {
            const std::size_t dep = index_of_time(traj, atom.window_lo);
            const double u0 = eval_fields(sc, atom.window_lo, traj.positions[dep]).u;
            pre_position = traj.positions[dep] + (atom.time - atom.window_lo) * u0;
        } else {
            pre_position = traj.positions[windows[a].first];
            tol += traj.epsilon * jump_speed_threshold(sc, cert, opts) * 1.5;
        }
        const double gap = eval_fields(sc, atom.time, pre_position).gamma - sc.gamma_star;
        if (std::abs(gap) > tol)
            throw AtomOutsideContactSetError(
                "jump atom at t = " + std::to_string(atom.time) +
                    " departs from a point with cohesion gap " + std::to_string(gap) +
                    " (tolerance " + std::to_string(tol) + ")",
                atom.time);
    }
}

}  // namespace

double resolved_contact_tol(const BoundsCertificate& cert, const MultiplierOptions& opts) {
    if (opts.contact_tol > 0.0) return opts.contact_tol;
    return 1e-3 * (cert.checked_gamma_max() - cert.gamma_star);
}

void check_trajectory(const Trajectory& traj, const Scenario& sc) {
    const std::size_t n = traj.size();
    if (n < 2 || traj.positions.size() != n || traj.mu.size() != n)
        throw InconsistentTrajectoryError("trajectory arrays empty or of mismatched length");
    if (traj.times.front() != 0.0)
        throw InconsistentTrajectoryError("trajectory does not start at t = 0");
    const double pos_slack = 1e-9 * std::max(1.0, sc.X_max);
    bool corrected_start = false;  // an atom at t = 0 moves the first stored sample off L0
    for (const JumpAtom& atom : traj.atoms)
        corrected_start = corrected_start || atom.time == 0.0;
    if (corrected_start ? traj.positions.front() < sc.L0 - pos_slack
                        : std::abs(traj.positions.front() - sc.L0) > pos_slack)
        throw InconsistentTrajectoryError("trajectory does not start at L0");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(traj.times[i + 1] > traj.times[i]))
            throw InconsistentTrajectoryError("sample times are not strictly increasing");
        if (traj.positions[i + 1] < traj.positions[i])
            throw InconsistentTrajectoryError("front position decreases between samples");
    }
    if (traj.positions.back() > sc.X_max + pos_slack)
        throw InconsistentTrajectoryError("front position exceeds the domain bound");
}

MultiplierDecomposition reconstruct_multiplier(const Trajectory& traj, const Scenario& sc,
                                               const BoundsCertificate& cert,
                                               const MultiplierOptions& opts) {
    check_trajectory(traj, sc);
    const std::size_t n = traj.size();
    MultiplierDecomposition out;
    out.mu_a.assign(n, 0.0);
    out.excluded.assign(n, 0);

    const std::vector<Window> windows = locate_windows(traj, sc, cert, opts);
    if (traj.method == SolveMethod::projection)
        out.atoms = traj.atoms;
    else
        out.atoms = penalty_atoms(traj, sc, windows);
    check_atom_support(traj, sc, cert, opts, out.atoms, windows);

    std::vector<unsigned char> in_window(n, 0);
    for (const Window& w : windows)
        for (std::size_t k = w.first; k <= w.last; ++k) in_window[k] = 1;
    for (std::size_t i = 0; i < n; ++i) {
        out.excluded[i] = in_window[i] || (i > 0 && in_window[i - 1]) ||
                          (i + 1 < n && in_window[i + 1]);
    }

    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (out.excluded[i]) continue;
        double deriv;
        if (i == 0)
            deriv = (traj.positions[1] - traj.positions[0]) / (traj.times[1] - traj.times[0]);
        else if (i + 1 == n)
            deriv = (traj.positions[n - 1] - traj.positions[n - 2]) /
                    (traj.times[n - 1] - traj.times[n - 2]);
        else
            deriv = (traj.positions[i + 1] - traj.positions[i - 1]) /
                    (traj.times[i + 1] - traj.times[i - 1]);
        const double u = eval_fields(sc, traj.times[i], traj.positions[i]).u;
        out.mu_a[i] = u - deriv;
        if (traj.method == SolveMethod::penalty) {
            defect = std::max(defect, std::abs(deriv + traj.mu[i] - u));
        } else if (i + 1 < n) {
            const double fwd =
                (traj.positions[i + 1] - traj.positions[i]) / (traj.times[i + 1] - traj.times[i]);
            defect = std::max(defect, std::abs(fwd + traj.mu[i] - u));
        }
    }
    out.defect = defect;
    return out;
}

std::vector<Regime> classify_regimes(const Trajectory& traj, const Scenario& sc,
                                     const MultiplierDecomposition& decomp,
                                     const BoundsCertificate& cert, const MultiplierOptions& opts) {
    const std::size_t n = traj.size();
    const double ctol = resolved_contact_tol(cert, opts);
    std::vector<unsigned char> in_window(n, 0);
    for (const JumpAtom& atom : decomp.atoms) {
        if (atom.window_hi <= atom.window_lo) {
            in_window[0] = 1;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (traj.times[i] > atom.window_lo && traj.times[i] <= atom.window_hi) in_window[i] = 1;
    }
    std::vector<Regime> regimes(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (in_window[i]) {
            regimes[i] = Regime::jump;
            continue;
        }
        const double gap = eval_fields(sc, traj.times[i], traj.positions[i]).gamma - sc.gamma_star;
        regimes[i] = gap > ctol ? Regime::interior : Regime::contact;
    }
    return regimes;
}

std::vector<std::pair<double, double>> contact_support(const Trajectory& traj, const Scenario& sc,
                                                       const BoundsCertificate& cert,
                                                       const MultiplierOptions& opts) {
    check_trajectory(traj, sc);
    const std::size_t n = traj.size();
    const double ctol = resolved_contact_tol(cert, opts);
    std::vector<std::pair<double, double>> support;
    std::size_t i = 0;
    while (i < n) {
        const double gap = eval_fields(sc, traj.times[i], traj.positions[i]).gamma - sc.gamma_star;
        if (gap > ctol) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n) {
            const double g =
                eval_fields(sc, traj.times[j + 1], traj.positions[j + 1]).gamma - sc.gamma_star;
            if (g > ctol) break;
            ++j;
        }
        const double lo = i > 0 ? traj.times[i - 1] : traj.times[i];
        const double hi = j + 1 < n ? traj.times[j + 1] : traj.times[j];
        support.emplace_back(lo, hi);
        i = j + 1;
    }
    return support;
}

double complementarity_residual(const MultiplierDecomposition& decomp, const Trajectory& traj,
                                const Scenario& sc) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (decomp.excluded[i]) continue;
        const double gap = eval_fields(sc, traj.times[i], traj.positions[i]).gamma - sc.gamma_star;
        worst = std::max(worst, std::abs(decomp.mu_a[i] * gap));
    }
    return worst;
}

}  // namespace freefront
