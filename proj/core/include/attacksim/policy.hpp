#pragma once

#include <vector>

#include "attacksim/network.hpp"
#include "attacksim/qnetwork.hpp"
#include "attacksim/rng.hpp"
#include "attacksim/state.hpp"
#include "attacksim/tabular.hpp"

namespace attacksim {

// Shared contract between the tabular and deep agents: map the
// current attacker state to an action index.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int select(const State& s, Rng& rng) = 0;
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(int num_actions);
  int select(const State& s, Rng& rng) override;

 private:
  int num_actions_;
};

// Greedy over a learned action value table; unseen states fall back
// to the all-zero row, so the lowest-index action.
class TabularPolicy final : public Policy {
 public:
  explicit TabularPolicy(QTable table);
  int select(const State& s, Rng& rng) override;

  const QTable& table() const { return table_; }

 private:
  QTable table_;
};

// Greedy over the value network's outputs.
class DqnPolicy final : public Policy {
 public:
  DqnPolicy(const Network& net, QNetworkT<float> weights);
  int select(const State& s, Rng& rng) override;

  const QNetworkT<float>& weights() const { return weights_; }

 private:
  const Network* net_;
  QNetworkT<float> weights_;
  std::vector<float> scratch_x_;
  std::vector<float> scratch_h_;
  std::vector<float> scratch_q_;
};

struct EvalRun {
  int steps = 0;
  double reward = 0.0;
  bool solved = false;
};

// Aggregates are all 0 when no runs were recorded.
struct EvalSummary {
  std::vector<EvalRun> runs;

  double solved_prop() const;
  double mean_reward() const;
  double stderr_reward() const;  // sample standard error of the mean
  double max_reward() const;
  double mean_steps() const;
};

// Runs the policy for `runs` fresh episodes.  Each step takes a
// uniformly random action with probability eval_eps, otherwise the
// policy's choice.  A run counts as solved when every sensitive
// machine is compromised within max_steps.
EvalSummary evaluate_policy(const Network& net, Policy& policy, int runs,
                            int max_steps, double eval_eps, Rng& rng,
                            double scan_cost = 1.0);

}  // namespace attacksim
