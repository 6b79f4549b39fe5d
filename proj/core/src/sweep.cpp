#include "freefront/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "freefront/errors.hpp"

namespace freefront {
namespace {

std::vector<std::pair<double, double>> atom_spans(const MultiplierDecomposition& decomp,
                                                  double w) {
    std::vector<std::pair<double, double>> spans;
    for (const JumpAtom& atom : decomp.atoms)
        spans.emplace_back(atom.window_lo - w, std::max(atom.window_hi, atom.time) + w);
    return spans;
}

bool excluded(const std::vector<std::pair<double, double>>& spans, double t) {
    for (const auto& s : spans)
        if (t >= s.first && t <= s.second) return true;
    return false;
}

double sup_distance(const Trajectory& a, const Trajectory& b,
                    const std::vector<std::pair<double, double>>& spans, int samples) {
    const double t_max = std::min(a.times.back(), b.times.back());
    double sup = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double t = t_max * j / (samples - 1);
        if (excluded(spans, t)) continue;
        sup = std::max(sup, std::abs(interpolate_position(a, t) - interpolate_position(b, t)));
    }
    return sup;
}

double paired_w_jump(const Scenario& sc, double epsilon, double step_floor, double depth,
                     double override_w) {
    if (override_w > 0.0) return override_w;
    const double scaled =
        depth > 0.0 ? 10.0 * epsilon * (sc.X_max - sc.L0) / depth : 0.0;
    return std::max(scaled, 10.0 * step_floor);
}

}  // namespace

double interpolate_position(const Trajectory& traj, double t) {
    if (t <= traj.times.front()) return traj.positions.front();
    if (t >= traj.times.back()) return traj.positions.back();
    auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - traj.times.begin());
    const double t0 = traj.times[i - 1], t1 = traj.times[i];
    const double w = (t - t0) / (t1 - t0);
    return traj.positions[i - 1] + w * (traj.positions[i] - traj.positions[i - 1]);
}

double violation_depth_estimate(const Scenario& sc, const GridSpec& grid) {
    double depth = 0.0;
    for (int i = 0; i < grid.t_samples; ++i) {
        const double t = sc.T * i / (grid.t_samples - 1);
        for (int j = 0; j < grid.x_samples; ++j) {
            const double x = sc.L0 + (sc.X_max - sc.L0) * j / (grid.x_samples - 1);
            depth = std::max(depth, sc.gamma_star - eval_fields(sc, t, x).gamma);
        }
    }
    return depth;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw NonPositiveValueError("rate fit needs at least 3 points, got " +
                                    std::to_string(points.size()));
    std::vector<double> xs, ys;
    for (const auto& [eps, value] : points) {
        if (!(eps > 0.0) || !(value > 0.0))
            throw NonPositiveValueError("rate fit requires positive epsilon and value, got (" +
                                        std::to_string(eps) + ", " + std::to_string(value) + ")");
        xs.push_back(std::log(eps));
        ys.push_back(std::log(value));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 1e-300 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

SweepResult epsilon_sweep(const Scenario& sc, const std::vector<double>& epsilons,
                          const SweepOptions& opts) {
    if (epsilons.size() < 2) throw SchemaError("sweep needs at least two epsilons");
    for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
        if (!(epsilons[i] > epsilons[i + 1]))
            throw SchemaError("sweep epsilons must be strictly decreasing");
    for (double eps : epsilons)
        if (!(eps > 0.0)) throw SchemaError("sweep epsilons must be positive");

    const ValidationResult validation = validate_hypotheses(sc);
    const BoundsCertificate& cert = validation.certificate;
    const double depth = violation_depth_estimate(sc);
    const double step_floor = opts.penalty.h_init > 0.0 ? opts.penalty.h_init : sc.T / 1000.0;

    SweepResult result;
    result.epsilons = epsilons;

    std::vector<Trajectory> runs;
    std::vector<MultiplierDecomposition> decomps;
    for (double eps : epsilons) {
        PenaltyOptions po = opts.penalty;
        po.epsilon = eps;
        Trajectory traj;
        try {
            traj = solve_penalized(sc, po);
        } catch (const StepUnderflowError& e) {
            throw StepUnderflowError("sweep entry epsilon = " + std::to_string(eps) +
                                         ": " + e.what(),
                                     e.t, e.stiffness);
        }
        SweepEntry entry;
        entry.epsilon = eps;
        entry.final_time = traj.times.back();
        entry.final_position = traj.positions.back();
        entry.samples = traj.size();
        entry.violation = violation_metrics(traj, sc);
        entry.bounds = run_bound_suite(traj, sc, cert, opts.params, opts.multiplier);
        const MultiplierDecomposition decomp = reconstruct_multiplier(traj, sc, cert, opts.multiplier);
        entry.atom_count = decomp.atoms.size();
        result.entries.push_back(std::move(entry));
        runs.push_back(std::move(traj));
        decomps.push_back(decomp);
    }

    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const double w = paired_w_jump(sc, epsilons[i + 1], step_floor, depth, opts.w_jump);
        std::vector<std::pair<double, double>> spans = atom_spans(decomps[i], w);
        for (auto& s : atom_spans(decomps[i + 1], w)) spans.push_back(s);
        result.cauchy.push_back(
            sup_distance(runs[i], runs[i + 1], spans, opts.comparison_samples));
    }

    std::vector<std::pair<double, double>> points;
    for (const SweepEntry& e : result.entries) points.emplace_back(e.epsilon, e.violation.l2_sq);
    try {
        result.rate_fit = fit_rate(points);
    } catch (const NonPositiveValueError&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        result.rate_fit = {nan, nan, nan};
    }

    const Trajectory baseline = solve_projected(sc, opts.projection);
    const MultiplierDecomposition base_decomp =
        reconstruct_multiplier(baseline, sc, cert, opts.multiplier);
    const double proj_step = opts.projection.h > 0.0 ? opts.projection.h : sc.T / 1e4;
    const double w_fine =
        paired_w_jump(sc, epsilons.back(), std::max(step_floor, proj_step), depth, opts.w_jump);
    std::vector<std::pair<double, double>> spans = atom_spans(decomps.back(), w_fine);
    for (auto& s : atom_spans(base_decomp, w_fine)) spans.push_back(s);
    result.oracle_gap = sup_distance(runs.back(), baseline, spans, opts.comparison_samples);
    return result;
}

double compare_solvers(const Scenario& sc, const CompareOptions& opts) {
    const ValidationResult validation = validate_hypotheses(sc);
    const BoundsCertificate& cert = validation.certificate;

    const Trajectory pen = solve_penalized(sc, opts.penalty);
    const Trajectory proj = solve_projected(sc, opts.projection);
    const MultiplierDecomposition pd = reconstruct_multiplier(pen, sc, cert, opts.multiplier);
    const MultiplierDecomposition jd = reconstruct_multiplier(proj, sc, cert, opts.multiplier);
    if (pd.atoms.size() != jd.atoms.size())
        throw JumpWindowsDisagreeError(
            "methods disagree on the atom count: penalty found " +
                std::to_string(pd.atoms.size()) + ", projection found " +
                std::to_string(jd.atoms.size()),
            static_cast<int>(pd.atoms.size()), static_cast<int>(jd.atoms.size()));

    const double depth = violation_depth_estimate(sc);
    const double proj_step = opts.projection.h > 0.0 ? opts.projection.h : sc.T / 1e4;
    const double w = paired_w_jump(sc, pen.epsilon, proj_step, depth, opts.w_jump);
    std::vector<std::pair<double, double>> spans = atom_spans(pd, w);
    for (auto& s : atom_spans(jd, w)) spans.push_back(s);
    return sup_distance(pen, proj, spans, opts.comparison_samples);
}

double compare_solvers(const Scenario& sc, double epsilon, double h) {
    CompareOptions opts;
    opts.penalty.epsilon = epsilon;
    opts.projection.h = h;
    return compare_solvers(sc, opts);
}

}  // namespace freefront
