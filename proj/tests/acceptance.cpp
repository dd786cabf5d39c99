// Acceptance checks for the simulator, the learners and the harness.
// Each criterion prints one [PASS]/[FAIL] line; the exit status is
// nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "attacksim/environment.hpp"
#include "attacksim/experiment.hpp"
#include "attacksim/generator.hpp"
#include "attacksim/scenario.hpp"
#include "attacksim/solvability.hpp"
#include "support/oracles.hpp"

using namespace attacksim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
bool bytes_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string drop_last_column(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t comma = line.rfind(',');
    out += comma == std::string::npos ? line : line.substr(0, comma);
    out += '\n';
  }
  return out;
}

GeneratorParams standard_generated_params() {
  GeneratorParams p;
  p.num_machines = 8;
  p.num_services = 3;
  p.prob_mode = ExploitProbMode::Deterministic;
  p.seed = 1;
  return p;
}

// 1. Exhaustive cross check of the transition function against an
// independently written oracle: every action sequence of length up to
// four on the two machine network, zero mismatches, under a second.
bool criterion1() {
  const auto start = Clock::now();
  Network net = testing::two_machine_network();
  const auto actions = action_space(net);
  const int n = static_cast<int>(actions.size());
  long sequences = 0, steps_compared = 0, mismatches = 0;
  for (int len = 1; len <= 4; ++len) {
    std::vector<int> digits(static_cast<std::size_t>(len), 0);
    for (;;) {
      ++sequences;
      Rng impl_rng(7), oracle_rng(7);
      State s = reset(net);
      State os = s;
      for (int k = 0; k < len; ++k) {
        StepResult got = step(net, s, actions[digits[static_cast<std::size_t>(k)]], impl_rng);
        testing::OracleOutcome want =
            testing::oracle_step(net, os, actions[digits[static_cast<std::size_t>(k)]], oracle_rng);
        ++steps_compared;
        if (!(got.next == want.next) || got.reward != want.reward ||
            got.done != want.done) {
          ++mismatches;
          break;
        }
        s = got.next;
        os = want.next;
      }
      int pos = len - 1;
      while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == n) {
        digits[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  const double secs = seconds_since(start);
  std::printf("    %ld sequences, %ld steps compared, %ld mismatches, %.3fs\n",
              sequences, steps_compared, mismatches, secs);
  return sequences == 340 && mismatches == 0 && secs < 1.0;
}

// 2. The reward of every step equals newly banked value minus the
// action cost, and no episode return beats the theoretical ceiling.
// Checked over ten thousand random steps on a stochastic generated
// network and a stochastic two machine network.
bool criterion2() {
  const auto start = Clock::now();
  GeneratorParams p = standard_generated_params();
  p.prob_mode = ExploitProbMode::CvssSampled;
  std::vector<Network> nets{generate_network(p),
                            testing::two_machine_network(0.6)};
  long checked = 0, violations = 0;
  for (std::size_t ni = 0; ni < nets.size(); ++ni) {
    const Network& net = nets[ni];
    const long target = 5000L * static_cast<long>(ni + 1);
    const auto report = solvability_oracle(net);
    const double ceiling = theoretical_max_return(net, report);
    const auto actions = action_space(net);
    Rng rng(123);
    while (checked < target) {
      State s = reset(net);
      double episode_return = 0.0;
      for (int t = 0; t < 400; ++t) {
        const Action& a = actions[uniform_below(rng, actions.size())];
        StepResult r = step(net, s, a, rng);
        double banked = 0.0;
        for (int m = 0; m < net.num_machines(); ++m)
          if (!s.compromised(m) && r.next.compromised(m))
            banked += net.machine(m).value();
        if (std::abs(r.reward - (banked - a.cost)) > 1e-9) ++violations;
        episode_return += r.reward;
        ++checked;
        s = r.next;
        if (r.done) break;
      }
      if (episode_return > ceiling + 1e-9) ++violations;
    }
  }
  const double secs = seconds_since(start);
  std::printf("    %ld steps checked, %ld violations, %.3fs\n", checked,
              violations, secs);
  return checked >= 10000 && violations == 0 && secs < 30.0;
}

// 3. The closed form state space bound matches one by one
// enumeration of canonical keys on small grids.
bool criterion3() {
  const std::uint64_t k11 = testing::enumerate_state_keys(1, 1);
  const std::uint64_t k21 = testing::enumerate_state_keys(2, 1);
  const std::uint64_t k12 = testing::enumerate_state_keys(1, 2);
  std::printf("    enumerated: (1,1)=%llu (2,1)=%llu (1,2)=%llu\n",
              static_cast<unsigned long long>(k11),
              static_cast<unsigned long long>(k21),
              static_cast<unsigned long long>(k12));
  bool ok = k11 == 12 && k21 == 144 && k12 == 36;
  ok = ok && state_space_size_bound(testing::toy_network()) == 12;
  ok = ok && state_space_size_bound(testing::two_machine_network()) == 144;
  Network one_machine_two_services = load_scenario(R"(subnets: [1]
topology:
- [1, 1]
- [1, 1]
sensitive_machines:
- [1, 0, 10]
services: [ssh, http]
service_exploits:
  ssh: [1, 1]
  http: [1, 1]
machine_configurations:
  "1,0": [ssh]
firewalls:
  "0,1": [ssh]
  "1,0": []
)");
  ok = ok && state_space_size_bound(one_machine_two_services) == 36;
  return ok;
}

// 4. One hundred generated networks across the sweep ranges all
// validate cleanly and are solvable, within a minute.
bool criterion4() {
  const auto start = Clock::now();
  Rng rng(42);
  int valid = 0, solvable = 0;
  for (int i = 0; i < 100; ++i) {
    GeneratorParams p;
    p.num_machines = 3 + static_cast<int>(uniform_below(rng, 41));
    p.num_services = 1 + static_cast<int>(uniform_below(rng, 51));
    p.seed = 1000 + static_cast<std::uint64_t>(i);
    Network net = generate_network(p);
    if (validate(net).empty()) ++valid;
    if (solvability_oracle(net).solvable) ++solvable;
  }
  const double secs = seconds_since(start);
  std::printf("    %d/100 valid, %d/100 solvable, %.3fs\n", valid, solvable,
              secs);
  return valid == 100 && solvable == 100 && secs < 60.0;
}

struct TabularRun {
  double ceiling = 0.0;
  double smoothed = 0.0;
  double secs = 0.0;
  EvalSummary eval;
};

TabularRun run_tabular_criterion(TabularAgentKind kind, double budget_secs) {
  Network net = generate_network(standard_generated_params());
  const auto report = solvability_oracle(net);
  TabularRun out;
  out.ceiling = theoretical_max_return(net, report);
  TabularHyperparams h;
  TrainBudget budget;
  budget.budget_secs = budget_secs;
  budget.stop_reward = out.ceiling - 1.0;
  const auto start = Clock::now();
  Rng train_rng(1);
  TabularTrainResult res = train_tabular(net, kind, h, budget, 500, train_rng);
  out.secs = seconds_since(start);
  out.smoothed = smoothed_reward(res.log);
  TabularPolicy policy(std::move(res.qtable));
  Rng eval_rng(2);
  out.eval = evaluate_policy(net, policy, 30, 500, 0.05, eval_rng);
  return out;
}

// 5. The epsilon greedy tabular agent masters the eight machine,
// three service generated scenario: smoothed training reward within
// 1 of the ceiling inside 60s, then 30 evaluation episodes at
// eps=0.05 solve at least 90% with a best return within 1 of the
// ceiling.
bool criterion5() {
  TabularRun r = run_tabular_criterion(TabularAgentKind::EpsilonGreedy, 60.0);
  std::printf(
      "    ceiling %.2f, smoothed %.4f, train %.1fs, solved %.2f, best %.2f\n",
      r.ceiling, r.smoothed, r.secs, r.eval.solved_prop(),
      r.eval.max_reward());
  return r.smoothed >= r.ceiling - 1.0 && r.secs < 60.0 &&
         r.eval.solved_prop() >= 0.9 &&
         std::abs(r.eval.max_reward() - r.ceiling) <= 1.0;
}

// 6. Same scenario, upper confidence bound exploration, 120s budget.
bool criterion6() {
  TabularRun r = run_tabular_criterion(TabularAgentKind::Ucb, 120.0);
  std::printf(
      "    ceiling %.2f, smoothed %.4f, train %.1fs, solved %.2f, best %.2f\n",
      r.ceiling, r.smoothed, r.secs, r.eval.solved_prop(),
      r.eval.max_reward());
  return r.secs < 120.0 && r.eval.solved_prop() >= 0.9 &&
         std::abs(r.eval.max_reward() - r.ceiling) <= 1.0;
}

// 7. The deep agent reaches the exact ceiling greedily on the small
// two subnet scenario within 300s; its analytic gradient matches
// central finite differences to 1e-4; syncing the target network is
// a bit for bit copy.
bool criterion7() {
  Network net = testing::small_deep_network();
  const auto report = solvability_oracle(net);
  const double ceiling = theoretical_max_return(net, report);

  DqlHyperparams h;
  h.hidden = 32;
  h.minibatch = 16;
  h.replay_capacity = 4096;
  h.target_sync_every = 100;
  h.lr = 0.005f;
  TrainBudget budget;
  budget.budget_secs = 300.0;
  budget.stop_reward = ceiling - 0.5;
  const auto start = Clock::now();
  Rng train_rng(1);
  DqlTrainResult res = train_dql(net, h, budget, 16, train_rng);
  const double secs = seconds_since(start);

  QNetworkT<float> weights = res.net;
  DqnPolicy policy(net, std::move(weights));
  Rng eval_rng(3);
  EvalSummary greedy = evaluate_policy(net, policy, 5, 16, 0.0, eval_rng);
  const bool mastered = secs < 300.0 &&
                        std::abs(greedy.max_reward() - ceiling) < 1e-9 &&
                        greedy.solved_prop() == 1.0;

  QNetworkT<float> target;
  target = res.net;  // the trainer's sync operation
  const bool sync_exact =
      bytes_equal(target.w1, res.net.w1) && bytes_equal(target.b1, res.net.b1) &&
      bytes_equal(target.w2, res.net.w2) && bytes_equal(target.b2, res.net.b2);

  // Gradient check against central differences on a double network.
  Rng grad_rng(9);
  QNetworkT<double> g = QNetworkT<double>::xavier(6, 5, 4, grad_rng);
  const int batch = 4;
  std::vector<double> xs(static_cast<std::size_t>(batch) * 6);
  std::vector<int> acts(batch);
  std::vector<double> ys(batch);
  for (auto& v : xs) v = 2.0 * uniform_double(grad_rng) - 1.0;
  for (int i = 0; i < batch; ++i) {
    acts[static_cast<std::size_t>(i)] = static_cast<int>(uniform_below(grad_rng, 4));
    ys[static_cast<std::size_t>(i)] = 2.0 * uniform_double(grad_rng) - 1.0;
  }
  QNetGrad<double> grad = QNetGrad<double>::zeros_like(g);
  batch_loss_grad<double>(g, xs, acts, ys, grad);
  double worst = 0.0;
  auto check_block = [&](std::vector<double>& params, const std::vector<double>& analytic) {
    const double hstep = 1e-6;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + hstep;
      const double up = batch_loss<double>(g, xs, acts, ys);
      params[i] = saved - hstep;
      const double down = batch_loss<double>(g, xs, acts, ys);
      params[i] = saved;
      const double fd = (up - down) / (2.0 * hstep);
      const double scale = std::max({std::abs(fd), std::abs(analytic[i]), 1e-8});
      worst = std::max(worst, std::abs(fd - analytic[i]) / scale);
    }
  };
  check_block(g.w1, grad.w1);
  check_block(g.b1, grad.b1);
  check_block(g.w2, grad.w2);
  check_block(g.b2, grad.b2);
  const bool grads_ok = worst < 1e-4;

  std::printf(
      "    ceiling %.2f, best greedy %.2f, train %.1fs, updates %llu, syncs "
      "%llu, worst grad rel err %.2e, sync exact %d\n",
      ceiling, greedy.max_reward(), secs,
      static_cast<unsigned long long>(res.updates),
      static_cast<unsigned long long>(res.target_syncs), worst,
      sync_exact ? 1 : 0);
  return mastered && sync_exact && grads_ok && res.updates > 0 &&
         res.target_syncs > 0;
}

// 8. On the shipped standard scenario the random agent's best
// evaluation return stays negative while a trained tabular agent's
// is positive.
bool criterion8() {
  Network net = load_scenario_file(testing::scenario_path("standard.yaml"));
  const auto actions = action_space(net);

  RandomPolicy random_policy(static_cast<int>(actions.size()));
  Rng random_rng(5);
  EvalSummary random_eval =
      evaluate_policy(net, random_policy, 30, 100, 0.0, random_rng);

  const auto report = solvability_oracle(net);
  const double ceiling = theoretical_max_return(net, report);
  TabularHyperparams h;
  TrainBudget budget;
  budget.budget_secs = 90.0;
  budget.stop_reward = ceiling - 1.0;
  Rng train_rng(1);
  TabularTrainResult res =
      train_tabular(net, TabularAgentKind::EpsilonGreedy, h, budget, 500, train_rng);
  TabularPolicy trained(std::move(res.qtable));
  Rng eval_rng(2);
  EvalSummary trained_eval = evaluate_policy(net, trained, 30, 500, 0.05, eval_rng);

  std::printf("    random best %.2f, trained best %.2f (ceiling %.2f)\n",
              random_eval.max_reward(), trained_eval.max_reward(), ceiling);
  return random_eval.max_reward() < 0.0 && trained_eval.max_reward() > 0.0;
}

double measure_rate(const Network& net, long num_actions) {
  const auto actions = action_space(net);
  Rng rng(1);
  State s = reset(net);
  const auto start = Clock::now();
  for (long i = 0; i < num_actions; ++i) {
    StepResult r = step(net, s, actions[static_cast<std::size_t>(i) % actions.size()], rng);
    s = r.done ? reset(net) : r.next;
  }
  return static_cast<double>(num_actions) / seconds_since(start);
}

// 9. Throughput: at least ten thousand actions per second on a 40
// machine network, a thousand on a 480 machine network, and a
// thousand machine, thousand service instance loads in under ten
// seconds.
bool criterion9() {
  GeneratorParams p;
  p.num_services = 10;
  p.seed = 1;

  p.num_machines = 40;
  const double rate_small = measure_rate(generate_network(p), 20000);

  p.num_machines = 480;
  const double rate_large = measure_rate(generate_network(p), 3000);

  const auto start = Clock::now();
  GeneratorParams big;
  big.num_machines = 1000;
  big.num_services = 1000;
  big.seed = 1;
  Network huge = generate_network(big);
  const auto actions = action_space(huge);
  State s = reset(huge);
  const double load_secs = seconds_since(start);

  std::printf(
      "    40 machines: %.0f actions/s, 480 machines: %.0f actions/s, "
      "1000x1000 load: %.2fs (%zu actions)\n",
      rate_small, rate_large, load_secs, actions.size());
  return rate_small >= 10000.0 && rate_large >= 1000.0 && load_secs < 10.0 &&
         s.num_machines() == 1000;
}

// 10. Re-running the harness with identical seeds in episode counted
// mode reproduces every artifact byte for byte, wall clock columns
// aside.
bool criterion10() {
  const fs::path root = fs::temp_directory_path() / "attacksim-acceptance-10";
  fs::remove_all(root);
  ExperimentSpec spec;
  spec.source.params = standard_generated_params();
  spec.agent = AgentKind::TabularEps;
  spec.max_episodes = 400;
  spec.budget_secs = 120.0;
  spec.max_steps = 100;
  spec.eval_runs = 10;
  spec.seeds = {1, 2};

  spec.out_dir = root / "a";
  auto first = run_train(spec);
  spec.out_dir = root / "b";
  auto second = run_train(spec);
  bool ok = first.size() == 2 && second.size() == 2;
  for (std::size_t i = 0; ok && i < first.size(); ++i) {
    ok = drop_last_column(read_file(first[i].dir / "train.csv")) ==
             drop_last_column(read_file(second[i].dir / "train.csv")) &&
         read_file(first[i].checkpoint) == read_file(second[i].checkpoint);
  }

  if (ok) {
    spec.seeds = {1};
    spec.out_dir = root / "ea";
    auto eval_a = run_eval(spec, first[0].checkpoint);
    spec.out_dir = root / "eb";
    auto eval_b = run_eval(spec, first[0].checkpoint);
    ok = read_file(eval_a[0].dir / "eval.csv") ==
         read_file(eval_b[0].dir / "eval.csv");
  }
  std::printf("    artifacts identical: %s\n", ok ? "yes" : "no");
  fs::remove_all(root);
  return ok;
}

struct Criterion {
  int id;
  const char* label;
  std::function<bool()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "transition function matches the exhaustive oracle", criterion1},
      {2, "rewards decompose into banked value minus cost", criterion2},
      {3, "state space bound matches enumeration", criterion3},
      {4, "generated networks validate and are solvable", criterion4},
      {5, "epsilon greedy tabular agent masters the generated scenario",
       criterion5},
      {6, "upper confidence bound agent masters the generated scenario",
       criterion6},
      {7, "deep agent masters the small scenario with exact gradients",
       criterion7},
      {8, "training beats the random baseline on the standard scenario",
       criterion8},
      {9, "simulator throughput and load time scale", criterion9},
      {10, "identical seeds reproduce artifacts byte for byte", criterion10},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    bool ok = false;
    std::string note;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      note = e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", c.id,
                c.label, note.empty() ? "" : " | exception: ", note.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
