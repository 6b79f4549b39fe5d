#include <benchmark/benchmark.h>

#include "freefront/apriori_bounds.hpp"
#include "freefront/expression.hpp"
#include "freefront/field_model.hpp"
#include "freefront/penalty_solver.hpp"
#include "freefront/projection_solver.hpp"

namespace {

using namespace freefront;

Scenario static_band() {
    Scenario sc;
    sc.gamma = FieldSpec::gauss_band(1.0, 0.0, 0.5);
    sc.velocity = FieldSpec::constant(0.2);
    sc.gamma_star = 0.62;
    sc.L0 = 0.0;
    sc.T = 8.0;
    sc.X_max = 6.0;
    return sc;
}

void BM_penalty_band(benchmark::State& state) {
    const Scenario sc = static_band();
    PenaltyOptions opts;
    opts.epsilon = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        Trajectory traj = solve_penalized(sc, opts);
        benchmark::DoNotOptimize(traj.positions.back());
    }
}
BENCHMARK(BM_penalty_band)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_projection_band(benchmark::State& state) {
    const Scenario sc = static_band();
    ProjectionOptions opts;
    opts.h = sc.T / static_cast<double>(state.range(0));
    for (auto _ : state) {
        Trajectory traj = solve_projected(sc, opts);
        benchmark::DoNotOptimize(traj.positions.back());
    }
}
BENCHMARK(BM_projection_band)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_eta_star(benchmark::State& state) {
    const Scenario sc = static_band();
    GridSpec grid{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(estimate_eta_star(sc, grid));
}
BENCHMARK(BM_eta_star)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_expression_eval(benchmark::State& state) {
    const Expression expr = Expression::parse("(1 - 0.05*t) - 2*0.5*x*exp(-x^2)");
    double t = 0.0, x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(expr.evaluate(t, x));
        t += 1e-6;
        x += 1e-6;
    }
}
BENCHMARK(BM_expression_eval);

void BM_bound_suite(benchmark::State& state) {
    const Scenario sc = static_band();
    PenaltyOptions opts;
    opts.epsilon = 1e-3;
    const Trajectory traj = solve_penalized(sc, opts);
    const BoundsCertificate cert = validate_hypotheses(sc).certificate;
    for (auto _ : state) {
        BoundSuite suite = run_bound_suite(traj, sc, cert);
        benchmark::DoNotOptimize(suite.all_satisfied);
    }
}
BENCHMARK(BM_bound_suite)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
