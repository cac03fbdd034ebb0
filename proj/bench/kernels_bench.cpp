#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "trustmw/bench.hpp"
#include "trustmw/synth.hpp"

namespace {

using namespace trustmw;

const Graph& patients(std::size_t n) {
  static std::map<std::size_t, Graph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    synth::GeneratorSpec spec;
    spec.patient_count = n;
    it = cache.emplace(n, synth::generate_patients(spec)).first;
  }
  return it->second;
}

void BM_RetrieveSerial(benchmark::State& state) {
  const Graph& g = patients(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(middleware::retrieve(g, ontology::vocab::kPatient));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RetrieveParallel(benchmark::State& state) {
  const Graph& g = patients(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(middleware::retrieve_parallel(g, ontology::vocab::kPatient));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void trajectory(benchmark::State& state, bool parallel) {
  bench::TrajectoryConfig cfg;
  cfg.runs = static_cast<std::size_t>(state.range(0));
  cfg.parallel = parallel;
  cfg.scenarios = {bench::Scenario::user_without_dua};
  for (auto _ : state) benchmark::DoNotOptimize(bench::run_trajectory(cfg));
}

void BM_TrajectorySerial(benchmark::State& state) { trajectory(state, false); }
void BM_TrajectoryParallel(benchmark::State& state) { trajectory(state, true); }

}  // namespace

BENCHMARK(BM_RetrieveSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RetrieveParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectorySerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectoryParallel)->Arg(32)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
}
