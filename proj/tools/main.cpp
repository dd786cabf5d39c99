#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "attacksim/environment.hpp"
#include "attacksim/errors.hpp"
#include "attacksim/experiment.hpp"
#include "attacksim/generator.hpp"
#include "attacksim/scenario.hpp"
#include "attacksim/solvability.hpp"

namespace {

using namespace attacksim;

struct CommonOpts {
  std::string scenario;
  GeneratorParams gen;
  std::string prob_mode = "cvss";
  std::string agent = "tabular-eps";
  double budget_secs = 120.0;
  std::optional<std::uint64_t> episodes;
  std::optional<double> stop_reward;
  int eval_runs = 30;
  double eval_eps = 0.05;
  int max_steps = 500;
  std::vector<std::uint64_t> seeds{1};
  std::string out;
  int jobs = 1;
  TabularHyperparams tab;
  DqlHyperparams dql;
  std::string checkpoint;
};

void add_generator_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--machines", o.gen.num_machines, "Machine count for generated networks");
  cmd->add_option("--services", o.gen.num_services, "Service count for generated networks");
  cmd->add_option("--prob-mode", o.prob_mode,
                  "Exploit probability mode: deterministic, cvss or user")
      ->check(CLI::IsMember({"deterministic", "cvss", "user"}));
  cmd->add_option("--probs", o.gen.user_probs,
                  "Per service success probability (user mode)")
      ->delimiter(',');
  cmd->add_flag("--invert-cvss", o.gen.invert_cvss,
                "Swap which difficulty scores map to high success probability");
  cmd->add_option("--restrictiveness", o.gen.restrictiveness,
                  "Upper limit on services a zone firewall permits");
  cmd->add_option("--alpha", o.gen.alpha,
                  "Configuration sampler concentration; lower means more reuse");
  cmd->add_option("--exploit-cost", o.gen.exploit_cost, "Cost of every exploit action");
  cmd->add_option("--scan-cost", o.gen.scan_cost, "Cost of every scan action");
  cmd->add_option("--sensitive-value", o.gen.sensitive_value,
                  "Value of each sensitive machine");
}

void add_source_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario document to load")
      ->check(CLI::ExistingFile);
  add_generator_options(cmd, o);
}

void add_agent_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--agent", o.agent, "Agent kind")
      ->check(CLI::IsMember({"tabular-eps", "tabular-ucb", "dql", "random"}));
  cmd->add_option("--step-size", o.tab.step_size, "Tabular learning rate");
  cmd->add_option("--discount", o.tab.discount, "Discount factor");
  cmd->add_option("--eps-max", o.tab.eps_max, "Initial exploration rate");
  cmd->add_option("--eps-min", o.tab.eps_min, "Final exploration rate");
  cmd->add_option("--eps-decay", o.tab.eps_decay, "Exploration decay rate");
  cmd->add_option("--ucb-c", o.tab.ucb_c, "Confidence bonus weight");
  cmd->add_option("--hidden", o.dql.hidden, "Hidden layer width");
  cmd->add_option("--minibatch", o.dql.minibatch, "Replay minibatch size");
  cmd->add_option("--replay", o.dql.replay_capacity, "Replay buffer capacity");
  cmd->add_option("--target-sync", o.dql.target_sync_every,
                  "Steps between target network syncs");
  cmd->add_option("--lr", o.dql.lr, "RMSprop learning rate");
}

void add_run_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--seed", o.seeds, "Run seeds")->delimiter(',');
  cmd->add_option("--max-steps", o.max_steps, "Step limit per episode");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--jobs", o.jobs, "Parallel worker count");
}

ScenarioSource make_source(const CommonOpts& o) {
  ScenarioSource source;
  source.path = o.scenario;
  source.params = o.gen;
  if (o.prob_mode == "deterministic")
    source.params.prob_mode = ExploitProbMode::Deterministic;
  else if (o.prob_mode == "user")
    source.params.prob_mode = ExploitProbMode::UserSupplied;
  else
    source.params.prob_mode = ExploitProbMode::CvssSampled;
  return source;
}

ExperimentSpec make_spec(const CommonOpts& o) {
  ExperimentSpec spec;
  spec.source = make_source(o);
  const std::optional<AgentKind> agent = parse_agent(o.agent);
  if (!agent) throw ParamError("unknown agent: " + o.agent);
  spec.agent = *agent;
  spec.tabular = o.tab;
  spec.dql = o.dql;
  spec.dql.discount = o.tab.discount;
  spec.dql.eps_max = o.tab.eps_max;
  spec.dql.eps_min = o.tab.eps_min;
  spec.dql.eps_decay = o.tab.eps_decay;
  spec.budget_secs = o.budget_secs;
  spec.max_episodes = o.episodes;
  spec.stop_reward = o.stop_reward;
  spec.eval_runs = o.eval_runs;
  spec.eval_eps = o.eval_eps;
  spec.max_steps = o.max_steps;
  spec.scan_cost = o.gen.scan_cost;
  spec.seeds = o.seeds;
  spec.out_dir = o.out;
  spec.jobs = o.jobs;
  return spec;
}

int cmd_generate(const CommonOpts& o) {
  ScenarioSource source = make_source(o);
  source.params.seed = o.seeds.front();
  const Network net = generate_network(source.params);
  const std::string doc = emit_scenario(net);
  if (o.out.empty()) {
    std::cout << doc;
  } else {
    write_scenario_file(net, o.out);
    std::cout << "wrote " << o.out << '\n';
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const Network net = load_scenario_file(path);
  const std::vector<std::string> problems = validate(net);
  if (!problems.empty()) {
    for (const std::string& p : problems) std::cout << p << '\n';
    return 1;
  }
  const SolvabilityReport sol = solvability_oracle(net);
  std::cout << path << ": ok, " << net.num_machines() << " machines, "
            << net.num_services() << " services, min exploits "
            << sol.min_exploits << (sol.exact ? "" : " (lower bound)")
            << ", theoretical max " << theoretical_max_return(net, sol) << '\n';
  return 0;
}

int cmd_train(const CommonOpts& o) {
  const std::vector<TrainOutcome> outcomes = run_train(make_spec(o));
  for (const TrainOutcome& t : outcomes) {
    std::cout << "seed " << t.seed << ": episodes=" << t.log.size()
              << " cum_steps=" << t.cum_steps << " smoothed_reward="
              << t.final_smoothed << " theoretical_max=" << t.theoretical_max
              << " wall_clock_s=" << t.wall_clock_s;
    if (!t.dir.empty()) std::cout << " -> " << t.dir.string();
    std::cout << '\n';
  }
  return 0;
}

int cmd_eval(const CommonOpts& o) {
  const std::vector<EvalOutcome> outcomes = run_eval(make_spec(o), o.checkpoint);
  for (const EvalOutcome& e : outcomes) {
    std::cout << "seed " << e.seed << ": runs=" << e.summary.runs.size()
              << " solved=" << e.summary.solved_prop()
              << " mean_reward=" << e.summary.mean_reward()
              << " stderr=" << e.summary.stderr_reward()
              << " max_reward=" << e.summary.max_reward() << '\n';
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& kind) {
  const SweepKind sweep_kind =
      kind == "machines" ? SweepKind::Machines : SweepKind::Services;
  const SweepResult result = run_sweep(sweep_kind, make_spec(o));
  for (const SweepRow& row : result.rows) {
    std::cout << "x=" << row.x_value << " seed=" << row.seed
              << " solved=" << row.solved_prop << " mean_reward=" << row.mean_reward
              << " stderr=" << row.stderr_reward << '\n';
  }
  return 0;
}

std::vector<BenchCell> parse_cells(const std::vector<std::string>& specs) {
  std::vector<BenchCell> cells;
  for (const std::string& text : specs) {
    const std::size_t cut = text.find('x');
    BenchCell cell;
    const char* end = text.data() + text.size();
    auto a = std::from_chars(text.data(), text.data() + cut, cell.machines);
    auto b = cut == std::string::npos
                 ? std::from_chars_result{nullptr, std::errc::invalid_argument}
                 : std::from_chars(text.data() + cut + 1, end, cell.services);
    if (cut == std::string::npos || a.ec != std::errc() || b.ec != std::errc() ||
        b.ptr != end)
      throw ParamError("bad bench cell (expected MxE): " + text);
    cells.push_back(cell);
  }
  return cells;
}

int cmd_bench(const CommonOpts& o, const std::vector<std::string>& cell_specs,
              int runs, int actions) {
  std::vector<BenchCell> cells = parse_cells(cell_specs);
  GeneratorParams base = make_source(o).params;
  base.seed = o.seeds.front();
  const std::vector<BenchRow> rows = run_bench(cells, base, runs, actions, o.out);
  for (const BenchRow& row : rows) {
    std::cout << row.machines << "x" << row.services
              << ": load_s=" << row.load_s_mean << " (sd " << row.load_s_sd
              << ") actions_per_s=" << row.actions_per_s_mean << " (sd "
              << row.actions_per_s_sd << ")\n";
  }
  return 0;
}

int cmd_trace(const CommonOpts& o) {
  const TraceOutput trace = run_trace(make_spec(o), o.checkpoint);
  if (o.out.empty()) {
    std::cout << trace.records;
    std::cout << trace.dot;
  } else {
    std::cout << "wrote " << (std::filesystem::path(o.out) / "trace.jsonl").string()
              << " and " << (std::filesystem::path(o.out) / "network.dot").string()
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network attack simulator and reinforcement learning harness"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  CLI::App* gen = app.add_subcommand("generate", "Generate a scenario document");
  add_generator_options(gen, gen_opts);
  gen->add_option("--seed", gen_opts.seeds, "Generation seed")->delimiter(',');
  gen->add_option("--out", gen_opts.out, "Output file (stdout when omitted)");

  std::string validate_path;
  CLI::App* check = app.add_subcommand("validate", "Check a scenario document");
  check->add_option("--scenario", validate_path, "Scenario document to check")
      ->check(CLI::ExistingFile)
      ->required();

  CommonOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "Train an agent");
  add_source_options(train, train_opts);
  add_agent_options(train, train_opts);
  add_run_options(train, train_opts);
  train->add_option("--budget-secs", train_opts.budget_secs, "Wall clock training budget");
  train->add_option("--episodes", train_opts.episodes,
                    "Stop after this many episodes (reproducible budget)");
  train->add_option("--stop-reward", train_opts.stop_reward,
                    "Stop once the smoothed episode reward reaches this value");

  CommonOpts eval_opts;
  CLI::App* evaluate = app.add_subcommand("eval", "Evaluate a trained policy");
  add_source_options(evaluate, eval_opts);
  add_agent_options(evaluate, eval_opts);
  add_run_options(evaluate, eval_opts);
  evaluate->add_option("--checkpoint", eval_opts.checkpoint,
                       "Saved policy (unused for the random agent)");
  evaluate->add_option("--eval-runs", eval_opts.eval_runs, "Evaluation episodes");
  evaluate->add_option("--eval-eps", eval_opts.eval_eps,
                       "Exploration rate during evaluation");

  CommonOpts sweep_opts;
  sweep_opts.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  sweep_opts.eval_runs = 10;
  std::string sweep_kind = "machines";
  CLI::App* sweep = app.add_subcommand("sweep", "Scaling sweep over generated networks");
  add_generator_options(sweep, sweep_opts);
  add_agent_options(sweep, sweep_opts);
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--kind", sweep_kind, "Sweep axis: machines or services")
      ->check(CLI::IsMember({"machines", "services"}));
  sweep->add_option("--budget-secs", sweep_opts.budget_secs, "Training budget per cell");
  sweep->add_option("--episodes", sweep_opts.episodes,
                    "Stop each cell after this many episodes");
  sweep->add_option("--eval-runs", sweep_opts.eval_runs, "Evaluation episodes per cell");
  sweep->add_option("--eval-eps", sweep_opts.eval_eps,
                    "Exploration rate during evaluation");

  CommonOpts bench_opts;
  std::vector<std::string> bench_cells{"10x10", "40x10", "160x10", "480x10",
                                       "1000x1000"};
  int bench_runs = 10;
  int bench_actions = 10000;
  CLI::App* bench = app.add_subcommand("bench", "Measure load time and step throughput");
  add_generator_options(bench, bench_opts);
  bench->add_option("--cell", bench_cells, "Grid cells as MxE")->delimiter(',');
  bench->add_option("--runs", bench_runs, "Measurements per cell");
  bench->add_option("--actions", bench_actions, "Actions per measurement");
  bench->add_option("--seed", bench_opts.seeds, "Base seed")->delimiter(',');
  bench->add_option("--out", bench_opts.out, "Output directory");

  CommonOpts trace_opts;
  CLI::App* trace = app.add_subcommand("trace", "Render one episode as JSONL and DOT");
  add_source_options(trace, trace_opts);
  add_agent_options(trace, trace_opts);
  add_run_options(trace, trace_opts);
  trace->add_option("--checkpoint", trace_opts.checkpoint,
                    "Saved policy (unused for the random agent)");
  trace->add_option("--eval-eps", trace_opts.eval_eps,
                    "Exploration rate while tracing");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_opts);
    if (check->parsed()) return cmd_validate(validate_path);
    if (train->parsed()) return cmd_train(train_opts);
    if (evaluate->parsed()) return cmd_eval(eval_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_kind);
    if (bench->parsed()) return cmd_bench(bench_opts, bench_cells, bench_runs, bench_actions);
    if (trace->parsed()) return cmd_trace(trace_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
