#include <benchmark/benchmark.h>

#include "cdde/presets.hpp"
#include "cdde/reduction.hpp"
#include "cdde/simulate.hpp"
#include "cdde/stability.hpp"

using namespace cdde;

namespace {

Trajectory history_for(const CyclicModel& m, double h, double tail_mass) {
    const double span = std::max(std::ceil(m.max_horizon(tail_mass) / h) * h, h);
    return Trajectory::constant(-span, 0.0, h, std::vector<double>(m.size(), 1.0));
}

void BM_integrate_undelayed(benchmark::State& state) {
    const auto m = make_preset("goodwin");
    SimConfig cfg;
    cfg.h = 1e-3;
    cfg.t_end = static_cast<double>(state.range(0));
    const auto hist = history_for(m, cfg.h, cfg.tail_mass);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_cyclic(m, hist, cfg));
}
BENCHMARK(BM_integrate_undelayed)->Arg(10)->Arg(50);

void BM_integrate_discrete_delay(benchmark::State& state) {
    const auto m = make_preset("yildirim");
    SimConfig cfg;
    cfg.h = 1e-3;
    cfg.t_end = static_cast<double>(state.range(0));
    const auto hist = history_for(m, cfg.h, cfg.tail_mass);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_cyclic(m, hist, cfg));
}
BENCHMARK(BM_integrate_discrete_delay)->Arg(10)->Arg(50);

void BM_integrate_distributed(benchmark::State& state) {
    Stage s0, s1;
    s0.feedback = FeedbackFn::linear(1.2);
    s0.kernel = DelayKernel::erlang(static_cast<int>(state.range(0)), 1.5);
    s0.clearance = StateFn::constant(0.7);
    s1.feedback = FeedbackFn::hill_down(2.0, 1.0, 2.0);
    s1.clearance = StateFn::constant(0.5);
    const CyclicModel m({s0, s1});
    SimConfig cfg;
    cfg.h = 1e-2;
    cfg.t_end = 20.0;
    const auto hist = history_for(m, cfg.h, cfg.tail_mass);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_cyclic(m, hist, cfg));
}
BENCHMARK(BM_integrate_distributed)->Arg(1)->Arg(3)->Arg(5);

void BM_check_equivalence(benchmark::State& state) {
    const auto m = make_preset("knauer");
    SimConfig cfg;
    cfg.h = 1e-3;
    cfg.t_end = 50.0;
    const auto hist = history_for(m, cfg.h, cfg.tail_mass);
    for (auto _ : state)
        benchmark::DoNotOptimize(check_equivalence(m, hist, cfg, {0, 1}, 1e-3));
}
BENCHMARK(BM_check_equivalence);

void BM_find_roots(benchmark::State& state) {
    const auto m = make_preset("yildirim");
    const auto eq = find_equilibria(m, 1e-6, 100.0);
    double xs = -1.0;
    for (const auto& r : eq.roots)
        if (r.positive) xs = std::max(xs, r.x_star);
    const auto cf = build_characteristic(m, xs);
    for (auto _ : state)
        benchmark::DoNotOptimize(find_roots(cf, {-5.0, 2.0, 20.0},
                                            static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_find_roots)->Arg(12)->Arg(24);

void BM_hopf_scan_point(benchmark::State& state) {
    ParamMap base = preset_defaults("knauer");
    base["a2"] = 0.3;
    base["p2"] = 0.5;
    auto family = [&](double d3) {
        ParamMap p = base;
        p["d3"] = d3;
        return make_preset("knauer", p);
    };
    for (auto _ : state)
        benchmark::DoNotOptimize(hopf_scan(family, {0.3, 0.35}, 1e-6, 100.0));
}
BENCHMARK(BM_hopf_scan_point);

} // namespace

BENCHMARK_MAIN();
