#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attacksim/dql.hpp"
#include "attacksim/generator.hpp"
#include "attacksim/network.hpp"
#include "attacksim/policy.hpp"
#include "attacksim/tabular.hpp"
#include "attacksim/trace.hpp"

namespace attacksim {

enum class AgentKind { TabularEps, TabularUcb, Dql, Random };

std::string_view agent_name(AgentKind kind);
std::optional<AgentKind> parse_agent(std::string_view name);

// Where an experiment's network comes from: a scenario document on
// disk, or the procedural generator.  Generated sources are reseeded
// with each run seed, so distinct seeds train on distinct networks.
struct ScenarioSource {
  std::string path;  // empty = use the generator params below
  GeneratorParams params;

  bool from_file() const { return !path.empty(); }
};

Network resolve_network(const ScenarioSource& source, std::uint64_t seed);

struct ExperimentSpec {
  ScenarioSource source;
  AgentKind agent = AgentKind::TabularEps;
  TabularHyperparams tabular;
  DqlHyperparams dql;
  double budget_secs = 120.0;
  std::optional<std::uint64_t> max_episodes;  // set = reproducible budget
  std::optional<double> stop_reward;
  int eval_runs = 30;
  double eval_eps = 0.05;
  int max_steps = 500;
  double scan_cost = 1.0;
  std::vector<std::uint64_t> seeds = {1};
  std::filesystem::path out_dir;  // empty = keep results in memory only
  int jobs = 1;
};

// Throws ParamError unless there is at least one seed, the budget is
// positive and the counts make sense.
void check_spec(const ExperimentSpec& spec);

struct TrainOutcome {
  std::uint64_t seed = 0;
  std::vector<EpisodeRow> log;
  double final_smoothed = 0.0;  // mean reward over the last 100 episodes
  double theoretical_max = 0.0;
  bool solvable = false;
  std::uint64_t cum_steps = 0;
  double wall_clock_s = 0.0;
  std::filesystem::path dir;         // per seed output directory
  std::filesystem::path checkpoint;  // saved policy, empty if not written
};

// Trains the configured agent once per seed and, when out_dir is set,
// writes <out>/seed-<seed>/{train.csv, checkpoint, metadata.json}.
// The random agent does not train and is rejected.
std::vector<TrainOutcome> run_train(const ExperimentSpec& spec);

struct EvalOutcome {
  std::uint64_t seed = 0;
  EvalSummary summary;
  std::filesystem::path dir;
};

// Evaluates a saved checkpoint (or the random agent, which needs
// none) once per seed; writes <out>/seed-<seed>/{eval.csv,
// metadata.json} when out_dir is set.
std::vector<EvalOutcome> run_eval(const ExperimentSpec& spec,
                                  const std::filesystem::path& checkpoint);

enum class SweepKind { Machines, Services };

// Machines: 3, 8, ..., 43 with the service count fixed; services: 1,
// 6, ..., 51 with the machine count fixed.
std::vector<int> sweep_grid(SweepKind kind);

struct SweepRow {
  int x_value = 0;
  std::uint64_t seed = 0;
  double solved_prop = 0.0;
  double mean_reward = 0.0;
  double stderr_reward = 0.0;
};

struct SweepEvalRow {
  int x_value = 0;
  std::uint64_t seed = 0;
  int run = 0;
  int steps = 0;
  double reward = 0.0;
  bool solved = false;
};

struct SweepResult {
  std::vector<int> grid;
  std::vector<SweepRow> rows;            // one per (x value, seed)
  std::vector<SweepEvalRow> eval_rows;   // one per (x value, seed, run)
};

// For every sweep point and seed: generate, train under the budget,
// evaluate eval_runs times.  Rows come back sorted by (x value, seed,
// run) regardless of worker scheduling.  Requires a generator source.
SweepResult run_sweep(SweepKind kind, const ExperimentSpec& spec);

struct BenchCell {
  int machines = 0;
  int services = 0;
};

struct BenchRow {
  int machines = 0;
  int services = 0;
  double load_s_mean = 0.0;
  double load_s_sd = 0.0;
  double actions_per_s_mean = 0.0;
  double actions_per_s_sd = 0.0;
};

// Per grid cell: `runs` measurements with distinct seeds of (a) the
// time to generate the network and build the simulator and (b) the
// step rate over actions_per_run actions taken from the action space
// in index order, resetting whenever an episode finishes.
std::vector<BenchRow> run_bench(const std::vector<BenchCell>& grid,
                                const GeneratorParams& base, int runs,
                                int actions_per_run,
                                const std::filesystem::path& out_dir);

// One episode driven by the checkpoint's policy (eval_eps exploration),
// rendered as a step trace and a DOT graph; writes trace.jsonl and
// network.dot under out_dir when set.  Uses the first seed.
TraceOutput run_trace(const ExperimentSpec& spec,
                      const std::filesystem::path& checkpoint);

// Reconstructs a policy from a saved checkpoint.  The random agent
// ignores the path.
std::unique_ptr<Policy> load_policy(AgentKind kind, const Network& net,
                                    int num_actions,
                                    const std::filesystem::path& checkpoint);

}  // namespace attacksim
