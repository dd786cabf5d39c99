#include "attacksim/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <span>
#include <thread>

#include "attacksim/environment.hpp"
#include "attacksim/errors.hpp"
#include "attacksim/scenario.hpp"
#include "attacksim/solvability.hpp"

namespace attacksim {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Distinct rng streams per run seed so training, evaluation, tracing
// and benchmarking never share a sequence.
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kEvalStream = 2;
constexpr std::uint64_t kTraceStream = 3;
constexpr std::uint64_t kBenchStream = 4;

template <typename T>
void append_num(std::string& out, T v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string train_csv(std::span<const EpisodeRow> log) {
  std::string out = "episode,steps,return,cum_steps,wall_clock_s\n";
  for (const EpisodeRow& row : log) {
    append_num(out, row.episode);
    out += ',';
    append_num(out, row.steps);
    out += ',';
    append_num(out, row.reward);
    out += ',';
    append_num(out, row.cum_steps);
    out += ',';
    append_num(out, row.wall_clock_s);
    out += '\n';
  }
  return out;
}

std::string eval_csv(const EvalSummary& summary) {
  std::string out = "run,steps,return,solved\n";
  for (std::size_t i = 0; i < summary.runs.size(); ++i) {
    const EvalRun& row = summary.runs[i];
    append_num(out, i);
    out += ',';
    append_num(out, row.steps);
    out += ',';
    append_num(out, row.reward);
    out += ',';
    out += row.solved ? '1' : '0';
    out += '\n';
  }
  return out;
}

// Runs fn(0..n-1) on `jobs` worker threads; the first exception wins
// and is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  threads.reserve(count);
  for (std::size_t i = 0; i < count; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

json environment_metadata(const Network& net, const SolvabilityReport& sol,
                          int num_actions) {
  json j;
  j["machines"] = net.num_machines();
  j["services"] = net.num_services();
  j["subnets"] = net.num_subnets();
  j["num_actions"] = num_actions;
  j["sensitive_machines"] = net.sensitive_machines().size();
  j["solvable"] = sol.solvable;
  j["min_exploits"] = sol.min_exploits;
  j["min_exploits_exact"] = sol.exact;
  j["theoretical_max"] = theoretical_max_return(net, sol);
  return j;
}

json source_metadata(const ScenarioSource& source, std::uint64_t seed) {
  json j;
  if (source.from_file()) {
    j["scenario_path"] = source.path;
  } else {
    j["generator"] = {{"machines", source.params.num_machines},
                      {"services", source.params.num_services},
                      {"seed", seed},
                      {"restrictiveness", source.params.restrictiveness},
                      {"alpha", source.params.alpha}};
  }
  return j;
}

double sample_mean(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct TrainedPolicy {
  std::unique_ptr<Policy> policy;
  std::vector<EpisodeRow> log;
  std::uint64_t cum_steps = 0;
  double wall_clock_s = 0.0;
};

// Trains in memory and wraps the result in the shared policy
// interface.  The random agent skips training.
TrainedPolicy train_policy(const Network& net, const ExperimentSpec& spec,
                           std::uint64_t rng_seed) {
  TrainedPolicy out;
  Rng rng(rng_seed);
  const TrainBudget budget{spec.budget_secs, spec.max_episodes, spec.stop_reward};
  switch (spec.agent) {
    case AgentKind::Random: {
      Environment env(net, spec.scan_cost);
      out.policy = std::make_unique<RandomPolicy>(env.num_actions());
      break;
    }
    case AgentKind::Dql: {
      DqlTrainResult r =
          train_dql(net, spec.dql, budget, spec.max_steps, rng, spec.scan_cost);
      out.log = std::move(r.log);
      out.cum_steps = r.cum_steps;
      out.wall_clock_s = r.wall_clock_s;
      out.policy = std::make_unique<DqnPolicy>(net, std::move(r.net));
      break;
    }
    case AgentKind::TabularEps:
    case AgentKind::TabularUcb: {
      const TabularAgentKind kind = spec.agent == AgentKind::TabularUcb
                                        ? TabularAgentKind::Ucb
                                        : TabularAgentKind::EpsilonGreedy;
      TabularTrainResult r = train_tabular(net, kind, spec.tabular, budget,
                                           spec.max_steps, rng, spec.scan_cost);
      out.log = std::move(r.log);
      out.cum_steps = r.cum_steps;
      out.wall_clock_s = r.wall_clock_s;
      out.policy = std::make_unique<TabularPolicy>(std::move(r.qtable));
      break;
    }
  }
  return out;
}

void save_policy(const Policy& policy, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (const auto* tabular = dynamic_cast<const TabularPolicy*>(&policy)) {
    tabular->table().save(out);
  } else if (const auto* dqn = dynamic_cast<const DqnPolicy*>(&policy)) {
    save_qnetwork(out, dqn->weights());
  } else {
    throw Error("policy kind has no checkpoint format");
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string_view agent_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::TabularEps: return "tabular-eps";
    case AgentKind::TabularUcb: return "tabular-ucb";
    case AgentKind::Dql: return "dql";
    case AgentKind::Random: return "random";
  }
  return "unknown";
}

std::optional<AgentKind> parse_agent(std::string_view name) {
  if (name == "tabular-eps") return AgentKind::TabularEps;
  if (name == "tabular-ucb") return AgentKind::TabularUcb;
  if (name == "dql") return AgentKind::Dql;
  if (name == "random") return AgentKind::Random;
  return std::nullopt;
}

Network resolve_network(const ScenarioSource& source, std::uint64_t seed) {
  if (source.from_file()) {
    Network net = load_scenario_file(source.path);
    const std::vector<std::string> problems = validate(net);
    if (!problems.empty())
      throw SemanticError("scenario " + source.path + ": " + problems.front());
    return net;
  }
  GeneratorParams params = source.params;
  params.seed = seed;
  return generate_network(params);
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw ParamError("need at least one seed");
  if (spec.budget_secs <= 0.0) throw ParamError("budget must be positive");
  if (spec.eval_runs < 0) throw ParamError("eval runs must be non-negative");
  if (spec.eval_eps < 0.0 || spec.eval_eps > 1.0)
    throw ParamError("eval epsilon must lie in [0, 1]");
  if (spec.max_steps <= 0) throw ParamError("max steps must be positive");
  if (spec.jobs < 1) throw ParamError("jobs must be at least 1");
}

std::vector<TrainOutcome> run_train(const ExperimentSpec& spec) {
  check_spec(spec);
  if (spec.agent == AgentKind::Random)
    throw ParamError("the random agent has nothing to train");
  std::vector<TrainOutcome> out(spec.seeds.size());
  parallel_for(spec.seeds.size(), spec.jobs, [&](std::size_t i) {
    const std::uint64_t seed = spec.seeds[i];
    const Network net = resolve_network(spec.source, seed);
    const SolvabilityReport sol = solvability_oracle(net);
    TrainedPolicy trained = train_policy(net, spec, mix_seed(seed, kTrainStream));

    TrainOutcome& o = out[i];
    o.seed = seed;
    o.log = std::move(trained.log);
    o.final_smoothed = smoothed_reward(o.log);
    o.theoretical_max = theoretical_max_return(net, sol);
    o.solvable = sol.solvable;
    o.cum_steps = trained.cum_steps;
    o.wall_clock_s = trained.wall_clock_s;

    if (!spec.out_dir.empty()) {
      o.dir = spec.out_dir / ("seed-" + std::to_string(seed));
      fs::create_directories(o.dir);
      write_text_file(o.dir / "train.csv", train_csv(o.log));
      o.checkpoint =
          o.dir / (spec.agent == AgentKind::Dql ? "qnet.bin" : "qtable.tsv");
      save_policy(*trained.policy, o.checkpoint);

      Environment env(net, spec.scan_cost);
      json meta;
      meta["command"] = "train";
      meta["agent"] = agent_name(spec.agent);
      meta["seed"] = seed;
      meta["source"] = source_metadata(spec.source, seed);
      meta["environment"] = environment_metadata(net, sol, env.num_actions());
      meta["budget_secs"] = spec.budget_secs;
      meta["max_steps"] = spec.max_steps;
      meta["episodes"] = o.log.size();
      meta["cum_steps"] = o.cum_steps;
      meta["wall_clock_s"] = o.wall_clock_s;
      meta["final_smoothed_reward"] = o.final_smoothed;
      write_text_file(o.dir / "metadata.json", meta.dump(2) + "\n");
    }
  });
  return out;
}

std::unique_ptr<Policy> load_policy(AgentKind kind, const Network& net,
                                    int num_actions, const fs::path& checkpoint) {
  if (kind == AgentKind::Random) return std::make_unique<RandomPolicy>(num_actions);
  std::ifstream in(checkpoint, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + checkpoint.string());
  if (kind == AgentKind::Dql)
    return std::make_unique<DqnPolicy>(net, load_qnetwork<float>(in));
  QTable table = QTable::load(in);
  if (table.num_actions() != num_actions)
    throw Error("checkpoint " + checkpoint.string() +
                " does not match the scenario's action space");
  return std::make_unique<TabularPolicy>(std::move(table));
}

std::vector<EvalOutcome> run_eval(const ExperimentSpec& spec,
                                  const fs::path& checkpoint) {
  check_spec(spec);
  if (spec.agent != AgentKind::Random && checkpoint.empty())
    throw ParamError("evaluation needs a checkpoint for trained agents");
  std::vector<EvalOutcome> out(spec.seeds.size());
  parallel_for(spec.seeds.size(), spec.jobs, [&](std::size_t i) {
    const std::uint64_t seed = spec.seeds[i];
    const Network net = resolve_network(spec.source, seed);
    Environment env(net, spec.scan_cost);
    std::unique_ptr<Policy> policy =
        load_policy(spec.agent, net, env.num_actions(), checkpoint);
    Rng rng(mix_seed(seed, kEvalStream));

    EvalOutcome& o = out[i];
    o.seed = seed;
    o.summary = evaluate_policy(net, *policy, spec.eval_runs, spec.max_steps,
                                spec.eval_eps, rng, spec.scan_cost);

    if (!spec.out_dir.empty()) {
      o.dir = spec.out_dir / ("seed-" + std::to_string(seed));
      fs::create_directories(o.dir);
      write_text_file(o.dir / "eval.csv", eval_csv(o.summary));

      const SolvabilityReport sol = solvability_oracle(net);
      json meta;
      meta["command"] = "eval";
      meta["agent"] = agent_name(spec.agent);
      meta["seed"] = seed;
      meta["source"] = source_metadata(spec.source, seed);
      meta["environment"] = environment_metadata(net, sol, env.num_actions());
      meta["eval_runs"] = spec.eval_runs;
      meta["eval_eps"] = spec.eval_eps;
      meta["max_steps"] = spec.max_steps;
      meta["solved_prop"] = o.summary.solved_prop();
      meta["mean_reward"] = o.summary.mean_reward();
      meta["stderr_reward"] = o.summary.stderr_reward();
      meta["max_reward"] = o.summary.max_reward();
      write_text_file(o.dir / "metadata.json", meta.dump(2) + "\n");
    }
  });
  return out;
}

std::vector<int> sweep_grid(SweepKind kind) {
  std::vector<int> grid;
  if (kind == SweepKind::Machines) {
    for (int m = 3; m <= 43; m += 5) grid.push_back(m);
  } else {
    for (int e = 1; e <= 51; e += 5) grid.push_back(e);
  }
  return grid;
}

SweepResult run_sweep(SweepKind kind, const ExperimentSpec& spec) {
  check_spec(spec);
  if (spec.source.from_file())
    throw ParamError("sweeps generate their networks; pass generator parameters");

  SweepResult result;
  result.grid = sweep_grid(kind);
  const std::size_t seeds = spec.seeds.size();
  const std::size_t cells = result.grid.size() * seeds;
  std::vector<SweepRow> rows(cells);
  std::vector<std::vector<SweepEvalRow>> evals(cells);

  parallel_for(cells, spec.jobs, [&](std::size_t cell) {
    const int x = result.grid[cell / seeds];
    const std::uint64_t seed = spec.seeds[cell % seeds];

    ExperimentSpec local = spec;
    local.out_dir.clear();
    if (kind == SweepKind::Machines)
      local.source.params.num_machines = x;
    else
      local.source.params.num_services = x;
    local.source.params.seed = seed;

    const Network net = generate_network(local.source.params);
    const std::uint64_t point_seed = mix_seed(seed, static_cast<std::uint64_t>(x));
    TrainedPolicy trained =
        train_policy(net, local, mix_seed(point_seed, kTrainStream));
    Rng eval_rng(mix_seed(point_seed, kEvalStream));
    const EvalSummary summary =
        evaluate_policy(net, *trained.policy, spec.eval_runs, spec.max_steps,
                        spec.eval_eps, eval_rng, spec.scan_cost);

    rows[cell] = SweepRow{x, seed, summary.solved_prop(), summary.mean_reward(),
                          summary.stderr_reward()};
    std::vector<SweepEvalRow>& detail = evals[cell];
    detail.reserve(summary.runs.size());
    for (std::size_t r = 0; r < summary.runs.size(); ++r) {
      const EvalRun& run = summary.runs[r];
      detail.push_back(SweepEvalRow{x, seed, static_cast<int>(r), run.steps,
                                    run.reward, run.solved});
    }
  });

  result.rows = std::move(rows);
  for (std::vector<SweepEvalRow>& detail : evals)
    result.eval_rows.insert(result.eval_rows.end(), detail.begin(), detail.end());

  if (!spec.out_dir.empty()) {
    fs::create_directories(spec.out_dir);
    std::string table = "x_value,seed,solved_prop,mean_reward,stderr\n";
    for (const SweepRow& row : result.rows) {
      append_num(table, row.x_value);
      table += ',';
      append_num(table, row.seed);
      table += ',';
      append_num(table, row.solved_prop);
      table += ',';
      append_num(table, row.mean_reward);
      table += ',';
      append_num(table, row.stderr_reward);
      table += '\n';
    }
    write_text_file(spec.out_dir / "sweep.csv", table);

    std::string detail = "x_value,seed,run,steps,return,solved\n";
    for (const SweepEvalRow& row : result.eval_rows) {
      append_num(detail, row.x_value);
      detail += ',';
      append_num(detail, row.seed);
      detail += ',';
      append_num(detail, row.run);
      detail += ',';
      append_num(detail, row.steps);
      detail += ',';
      append_num(detail, row.reward);
      detail += ',';
      detail += row.solved ? '1' : '0';
      detail += '\n';
    }
    write_text_file(spec.out_dir / "sweep_evals.csv", detail);

    json meta;
    meta["command"] = "sweep";
    meta["kind"] = kind == SweepKind::Machines ? "machines" : "services";
    meta["agent"] = agent_name(spec.agent);
    meta["grid"] = result.grid;
    meta["seeds"] = spec.seeds;
    meta["eval_runs"] = spec.eval_runs;
    meta["budget_secs"] = spec.budget_secs;
    write_text_file(spec.out_dir / "metadata.json", meta.dump(2) + "\n");
  }
  return result;
}

std::vector<BenchRow> run_bench(const std::vector<BenchCell>& grid,
                                const GeneratorParams& base, int runs,
                                int actions_per_run, const fs::path& out_dir) {
  if (grid.empty()) throw ParamError("bench needs at least one grid cell");
  if (runs <= 0 || actions_per_run <= 0)
    throw ParamError("bench needs positive run and action counts");

  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  rows.reserve(grid.size());
  for (const BenchCell& cell : grid) {
    std::vector<double> load_s(static_cast<std::size_t>(runs));
    std::vector<double> rate(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) {
      GeneratorParams params = base;
      params.num_machines = cell.machines;
      params.num_services = cell.services;
      params.seed = mix_seed(base.seed, static_cast<std::uint64_t>(r));

      const auto t0 = clock::now();
      const Network net = generate_network(params);
      Environment env(net, params.scan_cost);
      load_s[static_cast<std::size_t>(r)] =
          std::chrono::duration<double>(clock::now() - t0).count();

      Rng rng(mix_seed(params.seed, kBenchStream));
      env.reset();
      const int num_actions = env.num_actions();
      const auto t1 = clock::now();
      for (int i = 0; i < actions_per_run; ++i) {
        const StepOutcome outcome = env.step(i % num_actions, rng);
        if (outcome.done) env.reset();
      }
      const double secs = std::chrono::duration<double>(clock::now() - t1).count();
      rate[static_cast<std::size_t>(r)] =
          static_cast<double>(actions_per_run) / std::max(secs, 1.0e-9);
    }
    rows.push_back(BenchRow{cell.machines, cell.services, sample_mean(load_s),
                            sample_sd(load_s), sample_mean(rate), sample_sd(rate)});
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::string csv =
        "machines,services,load_s_mean,load_s_sd,actions_per_s_mean,"
        "actions_per_s_sd\n";
    for (const BenchRow& row : rows) {
      append_num(csv, row.machines);
      csv += ',';
      append_num(csv, row.services);
      csv += ',';
      append_num(csv, row.load_s_mean);
      csv += ',';
      append_num(csv, row.load_s_sd);
      csv += ',';
      append_num(csv, row.actions_per_s_mean);
      csv += ',';
      append_num(csv, row.actions_per_s_sd);
      csv += '\n';
    }
    write_text_file(out_dir / "bench.csv", csv);
  }
  return rows;
}

TraceOutput run_trace(const ExperimentSpec& spec, const fs::path& checkpoint) {
  check_spec(spec);
  const std::uint64_t seed = spec.seeds.front();
  const Network net = resolve_network(spec.source, seed);
  Environment env(net, spec.scan_cost);
  std::unique_ptr<Policy> policy =
      load_policy(spec.agent, net, env.num_actions(), checkpoint);
  Rng rng(mix_seed(seed, kTraceStream));

  env.reset();
  const State initial = env.state();
  std::vector<EpisodeStep> steps;
  for (int t = 0; t < spec.max_steps; ++t) {
    int action = 0;
    if (uniform_double(rng) < spec.eval_eps)
      action = static_cast<int>(
          uniform_index(rng, static_cast<std::size_t>(env.num_actions())));
    else
      action = policy->select(env.state(), rng);
    const StepOutcome outcome = env.step(action, rng);
    steps.push_back(EpisodeStep{env.state(), env.actions()[static_cast<std::size_t>(action)],
                                outcome.reward});
    if (outcome.done) break;
  }

  TraceOutput out = render_trace(net, initial, steps);
  if (!spec.out_dir.empty()) {
    fs::create_directories(spec.out_dir);
    write_text_file(spec.out_dir / "trace.jsonl", out.records);
    write_text_file(spec.out_dir / "network.dot", out.dot);
  }
  return out;
}

}  // namespace attacksim
