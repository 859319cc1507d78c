#include <benchmark/benchmark.h>

#include <vector>

#include "semfunc/inference.hpp"
#include "semfunc/mean_field.hpp"
#include "semfunc/oracle.hpp"
#include "semfunc/rng.hpp"
#include "semfunc/training.hpp"

#include "../tests/support/random_models.hpp"
#include "../tests/support/synthetic_world.hpp"

namespace {

using namespace semfunc;

void bm_mean_field_single(benchmark::State& state) {
  const std::size_t dims = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const WorldModel m =
      testsupport::random_single_node_model(rng, dims, dims / 10 + 1, 2);
  const GraphTopology topology({"n"}, {});
  const std::vector<TruthCondition> conditions{{"n", "a", true}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mean_field_optimize(m, topology, conditions));
  }
}
BENCHMARK(bm_mean_field_single)->Arg(20)->Arg(50)->Arg(200);

void bm_mean_field_svo(benchmark::State& state) {
  const std::size_t dims = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  WorldModel m =
      testsupport::random_single_node_model(rng, dims, dims / 10 + 1, 3);
  for (const char* label : {"ARG1", "ARG2"}) {
    Matrix w(dims, dims);
    for (double& v : w.data()) {
      v = rng.next_in(-0.5, 0.5);
    }
    m.links[label] = std::move(w);
  }
  const GraphTopology topology = svo_topology();
  const std::vector<TruthCondition> conditions{
      {"x", "a", true}, {"y", "b", true}, {"z", "c", true}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mean_field_optimize(m, topology, conditions));
  }
}
BENCHMARK(bm_mean_field_svo)->Arg(20)->Arg(50);

void bm_oracle_chain_posterior(benchmark::State& state) {
  const std::size_t dims = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const WorldModel m = testsupport::random_chain_model(rng, dims, 2, 2);
  const GraphTopology topology = testsupport::chain3();
  const std::vector<TruthCondition> conditions{{"n0", "a", true}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        oracle::posterior_marginals(m, topology, conditions));
  }
}
BENCHMARK(bm_oracle_chain_posterior)->Arg(4)->Arg(6);

void bm_observation_value(benchmark::State& state) {
  const std::vector<TripleRecord> triples =
      testsupport::sample_world_triples(500, 4);
  const VocabularyBuildResult built = build_vocabulary(triples);
  TrainingConfig config;
  config.space = SpaceConfig{50, 5};
  const WorldModel model = initialize_model(built.kept, built.vocab, config);
  const std::vector<Observation> observations =
      observations_from_triples(built.kept, built.vocab);
  const NegativeSampler sampler(model, 0.75);
  Rng rng(5);
  MeanFieldSettings settings;
  settings.tolerance = 1e-3;
  settings.max_sweeps = 15;
  const ObservationWorkspace workspace = prepare_observation(
      model, observations.front(), sampler, 5, rng, settings);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        observation_value(model, observations.front(), workspace));
  }
}
BENCHMARK(bm_observation_value);

void bm_prepare_observation(benchmark::State& state) {
  const std::vector<TripleRecord> triples =
      testsupport::sample_world_triples(500, 6);
  const VocabularyBuildResult built = build_vocabulary(triples);
  TrainingConfig config;
  config.space = SpaceConfig{50, 5};
  const WorldModel model = initialize_model(built.kept, built.vocab, config);
  const std::vector<Observation> observations =
      observations_from_triples(built.kept, built.vocab);
  const NegativeSampler sampler(model, 0.75);
  MeanFieldSettings settings;
  settings.tolerance = 1e-3;
  settings.max_sweeps = 15;
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prepare_observation(
        model, observations.front(), sampler, 5, rng, settings));
  }
}
BENCHMARK(bm_prepare_observation);

}  // namespace

BENCHMARK_MAIN();
