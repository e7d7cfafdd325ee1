#include <benchmark/benchmark.h>

#include "pdifmp/drivers.hpp"
#include "pdifmp/flows.hpp"
#include "pdifmp/gbm_models.hpp"
#include "pdifmp/glioma.hpp"
#include "pdifmp/jump_engine.hpp"
#include "pdifmp/philox.hpp"

namespace {

using namespace pdifmp;

void BM_PhiloxBlock(benchmark::State& state) {
    Philox4x32::Counter ctr{0, 0, 0, 0};
    const Philox4x32::Key key{0x12345678u, 0x9abcdef0u};
    for (auto _ : state) {
        benchmark::DoNotOptimize(Philox4x32::generate(ctr, key));
        ++ctr[0];
    }
}
BENCHMARK(BM_PhiloxBlock);

void BM_WienerIncrement(benchmark::State& state) {
    auto stream = DriverStream::fork_for_path(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(stream.wiener_increment(1e-3));
}
BENCHMARK(BM_WienerIncrement);

void BM_GbmEulerPath(benchmark::State& state) {
    const auto mf = gbm::make_model(gbm::weak_test_defaults());
    const EulerMaruyamaFlow em;
    SimulationOptions opts;
    opts.step = 1.0 / static_cast<double>(state.range(0));
    std::uint64_t path = 0;
    for (auto _ : state) {
        auto stream = DriverStream::fork_for_path(7, path++);
        benchmark::DoNotOptimize(simulate_path(mf.model, em, stream, opts));
    }
}
BENCHMARK(BM_GbmEulerPath)->Arg(64)->Arg(4096);

void BM_GbmCoupledFinalState(benchmark::State& state) {
    const auto mf = gbm::make_model(gbm::weak_test_defaults());
    const EulerMaruyamaFlow em;
    const FlowIntegrator* lanes[] = {&em, mf.exact_flow.get()};
    SimulationOptions opts;
    opts.step = 1.0 / 64.0;
    opts.record_stride = ~std::size_t{0};
    std::uint64_t path = 0;
    for (auto _ : state) {
        auto stream = DriverStream::fork_for_path(7, path++);
        benchmark::DoNotOptimize(simulate_lanes(mf.model, lanes, stream, opts));
    }
}
BENCHMARK(BM_GbmCoupledFinalState);

void BM_GliomaSplittingStep(benchmark::State& state) {
    const glioma::Params p;
    GliomaState s{0.0, 0.5, p.alpha};
    double dw = 1e-3;
    for (auto _ : state) {
        s = glioma_splitting_step(s, p, 1e-4, dw);
        dw = -dw;
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_GliomaSplittingStep);

void BM_GliomaCoupledPath(benchmark::State& state) {
    glioma::Params p;
    p.horizon = 1.0;
    const auto model = glioma::make_model(p);
    const EulerMaruyamaFlow tem;
    const GliomaSplittingFlow tsm(p);
    SimulationOptions opts;
    opts.step = 1e-4;
    std::uint64_t path = 0;
    for (auto _ : state) {
        auto stream = DriverStream::fork_for_path(3, path++);
        benchmark::DoNotOptimize(simulate_coupled_pair(model, tem, tsm, stream, opts));
    }
}
BENCHMARK(BM_GliomaCoupledPath)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
