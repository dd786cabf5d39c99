#include <benchmark/benchmark.h>

#include "attacksim/action.hpp"
#include "attacksim/environment.hpp"
#include "attacksim/generator.hpp"
#include "attacksim/qnetwork.hpp"
#include "attacksim/scenario.hpp"
#include "attacksim/state.hpp"
#include "attacksim/tabular.hpp"

namespace {

using namespace attacksim;

GeneratorParams sized(int machines, int services) {
  GeneratorParams params;
  params.num_machines = machines;
  params.num_services = services;
  params.seed = 11;
  return params;
}

void BM_GenerateNetwork(benchmark::State& state) {
  const GeneratorParams params =
      sized(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    Network net = generate_network(params);
    benchmark::DoNotOptimize(net.num_machines());
  }
}
BENCHMARK(BM_GenerateNetwork)->Args({16, 5})->Args({40, 10})->Args({480, 10})->Args({1000, 1000})->Unit(benchmark::kMillisecond);

void BM_ActionSpace(benchmark::State& state) {
  const Network net = generate_network(
      sized(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  for (auto _ : state) {
    std::vector<Action> actions = action_space(net);
    benchmark::DoNotOptimize(actions.size());
  }
}
BENCHMARK(BM_ActionSpace)->Args({16, 5})->Args({480, 10});

void BM_EnvironmentStep(benchmark::State& state) {
  const Network net = generate_network(
      sized(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  Environment env(net);
  Rng rng(5);
  env.reset();
  const int num_actions = env.num_actions();
  int i = 0;
  for (auto _ : state) {
    const StepOutcome outcome = env.step(i % num_actions, rng);
    if (outcome.done) env.reset();
    ++i;
    benchmark::DoNotOptimize(outcome.reward);
  }
}
BENCHMARK(BM_EnvironmentStep)->Args({16, 5})->Args({40, 10})->Args({480, 10});

void BM_CanonicalKey(benchmark::State& state) {
  const Network net = generate_network(
      sized(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  const State s = reset(net);
  for (auto _ : state) {
    std::string key = canonical_key(s);
    benchmark::DoNotOptimize(key.size());
  }
}
BENCHMARK(BM_CanonicalKey)->Args({16, 5})->Args({480, 10});

void BM_ScenarioRoundTrip(benchmark::State& state) {
  const Network net = generate_network(sized(16, 5));
  for (auto _ : state) {
    Network again = load_scenario(emit_scenario(net));
    benchmark::DoNotOptimize(again.num_machines());
  }
}
BENCHMARK(BM_ScenarioRoundTrip);

void BM_QNetworkForward(benchmark::State& state) {
  Rng rng(7);
  const int in = 16 * 7;
  const int out = 16 * 6;
  const QNetworkT<float> net =
      QNetworkT<float>::xavier(in, static_cast<int>(state.range(0)), out, rng);
  std::vector<float> x(static_cast<std::size_t>(in), 0.5f);
  std::vector<float> hidden(static_cast<std::size_t>(net.hidden_dim));
  std::vector<float> q(static_cast<std::size_t>(net.out_dim));
  for (auto _ : state) {
    net.forward_cached(x, hidden, q);
    benchmark::DoNotOptimize(q[0]);
  }
}
BENCHMARK(BM_QNetworkForward)->Arg(64)->Arg(256);

void BM_QTableUpdate(benchmark::State& state) {
  const Network net = generate_network(sized(16, 5));
  Environment env(net);
  Rng rng(9);
  env.reset();
  QTable table(env.num_actions());
  TabularHyperparams h;
  std::string key = canonical_key(env.state());
  int i = 0;
  for (auto _ : state) {
    const int action = i % env.num_actions();
    const StepOutcome outcome = env.step(action, rng);
    std::string next_key = canonical_key(env.state());
    q_update(table.row_mut(key), action, outcome.reward, table.row(next_key),
             outcome.done, h);
    key = std::move(next_key);
    if (outcome.done) {
      env.reset();
      key = canonical_key(env.state());
    }
    ++i;
  }
}
BENCHMARK(BM_QTableUpdate);

}  // namespace

BENCHMARK_MAIN();
