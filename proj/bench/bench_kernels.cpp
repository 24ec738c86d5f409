// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "traderbench/agents.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/harness.hpp"
#include "traderbench/options.hpp"
#include "traderbench/rng.hpp"

using namespace traderbench;

namespace {

double U(Rng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

std::vector<options::OptionInputs> inputs(std::size_t n) {
    Rng rng(7, "bench.options");
    std::vector<options::OptionInputs> out(n);
    for (auto& in : out) {
        in.spot = U(rng, 50, 150);
        in.strike = U(rng, 50, 150);
        in.rate = U(rng, 0, 0.05);
        in.vol = U(rng, 0.05, 1.0);
        in.expiry_years = U(rng, 0.05, 2.0);
        in.right = U(rng, 0, 1) < 0.5 ? options::Right::Call : options::Right::Put;
    }
    return out;
}

void BM_price_serial(benchmark::State& st) {
    const auto in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(options::price_batch_serial(in));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_price_omp(benchmark::State& st) {
    const auto in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(options::price_batch(in));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_greeks_serial(benchmark::State& st) {
    const auto in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(options::greeks_batch_serial(in));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_greeks_omp(benchmark::State& st) {
    const auto in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(options::greeks_batch(in));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct Grid {
    std::vector<agents::Agent> agents;
    std::vector<CandleSeries> series;
    std::vector<transforms::TransformSpec> specs = harness::default_transforms(42);
    std::vector<harness::GridCell> cells;

    Grid() {
        for (const char* name : {"inert", "buyhold", "ma_cross", "rsi", "macd"})
            agents.push_back(agents::make_agent({name, {}}));
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            fixtures::FixtureSpec f;
            f.shape = fixtures::Shape::RandomWalk;
            f.length = 500;
            f.vol = 0.01;
            f.seed = seed;
            f.symbol = "W" + std::to_string(seed);
            series.push_back(fixtures::generate_fixture(f));
        }
        cells = harness::episode_grid(agents.size(), series.size(), specs.size());
    }
};

void BM_grid_serial(benchmark::State& st) {
    const Grid g;
    for (auto _ : st)
        benchmark::DoNotOptimize(harness::run_grid_serial(g.agents, g.series, g.specs, {10000, 10, false}, g.cells));
}

void BM_grid_omp(benchmark::State& st) {
    const Grid g;
    for (auto _ : st)
        benchmark::DoNotOptimize(harness::run_grid(g.agents, g.series, g.specs, {10000, 10, false}, g.cells));
}

}  // namespace

BENCHMARK(BM_price_serial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_price_omp)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_greeks_serial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_greeks_omp)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_grid_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grid_omp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
