#include <psocp/basis.hpp>
#include <psocp/covector.hpp>
#include <psocp/integrate.hpp>
#include <psocp/sqp.hpp>
#include <psocp/transcribe.hpp>
#include <psocp/vv.hpp>

#include <benchmark/benchmark.h>

namespace {

void BM_GridConstruction(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        psocp::Grid g(n);
        benchmark::DoNotOptimize(g.diff().data());
    }
}
BENCHMARK(BM_GridConstruction)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_PendulumJacobian(benchmark::State& state) {
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem({}),
                                       psocp::Grid(static_cast<int>(state.range(0))));
    const auto v = nlp->default_start();
    for (auto _ : state) {
        auto j = nlp->jacobian(v);
        benchmark::DoNotOptimize(j.data());
    }
}
BENCHMARK(BM_PendulumJacobian)->Arg(24)->Arg(32)->Arg(64);

void BM_PendulumSolve(benchmark::State& state) {
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem({}),
                                       psocp::Grid(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        auto sol = psocp::solve(*nlp, nlp->default_start());
        benchmark::DoNotOptimize(sol.objective);
    }
}
BENCHMARK(BM_PendulumSolve)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FeasibilityCheck(benchmark::State& state) {
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem({}), psocp::Grid(32));
    const auto sol = psocp::solve(*nlp, nlp->default_start());
    const auto traj = nlp->trajectory(sol.primal);
    for (auto _ : state) {
        auto report = psocp::verify_feasibility(traj, nlp->problem(), nlp->grid());
        benchmark::DoNotOptimize(report.max_state_deviation);
    }
}
BENCHMARK(BM_FeasibilityCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
