#include "attacksim/policy.hpp"

#include <algorithm>
#include <cmath>

#include "attacksim/dql.hpp"
#include "attacksim/environment.hpp"
#include "attacksim/errors.hpp"

namespace attacksim {

RandomPolicy::RandomPolicy(int num_actions) : num_actions_(num_actions) {
  if (num_actions <= 0) throw Error("policy: need at least one action");
}

int RandomPolicy::select(const State&, Rng& rng) {
  return static_cast<int>(uniform_index(rng, static_cast<std::size_t>(num_actions_)));
}

TabularPolicy::TabularPolicy(QTable table) : table_(std::move(table)) {}

int TabularPolicy::select(const State& s, Rng&) {
  return argmax_lowest(table_.row(canonical_key(s)));
}

DqnPolicy::DqnPolicy(const Network& net, QNetworkT<float> weights)
    : net_(&net), weights_(std::move(weights)) {
  if (weights_.in_dim != state_vector_size(net))
    throw Error("policy: network weights do not match the scenario");
  scratch_x_.resize(static_cast<std::size_t>(weights_.in_dim));
  scratch_h_.resize(static_cast<std::size_t>(weights_.hidden_dim));
  scratch_q_.resize(static_cast<std::size_t>(weights_.out_dim));
}

int DqnPolicy::select(const State& s, Rng&) {
  vectorize_state<float>(*net_, s, scratch_x_);
  weights_.forward_cached(scratch_x_, scratch_h_, scratch_q_);
  int best = 0;
  for (int i = 1; i < static_cast<int>(scratch_q_.size()); ++i)
    if (scratch_q_[static_cast<std::size_t>(i)] >
        scratch_q_[static_cast<std::size_t>(best)])
      best = i;
  return best;
}

double EvalSummary::solved_prop() const {
  if (runs.empty()) return 0.0;
  std::size_t solved = 0;
  for (const EvalRun& r : runs) solved += r.solved ? 1 : 0;
  return static_cast<double>(solved) / static_cast<double>(runs.size());
}

double EvalSummary::mean_reward() const {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const EvalRun& r : runs) sum += r.reward;
  return sum / static_cast<double>(runs.size());
}

double EvalSummary::stderr_reward() const {
  if (runs.size() < 2) return 0.0;
  const double mean = mean_reward();
  double ss = 0.0;
  for (const EvalRun& r : runs) ss += (r.reward - mean) * (r.reward - mean);
  const double var = ss / static_cast<double>(runs.size() - 1);
  return std::sqrt(var / static_cast<double>(runs.size()));
}

double EvalSummary::max_reward() const {
  if (runs.empty()) return 0.0;
  double best = runs.front().reward;
  for (const EvalRun& r : runs) best = std::max(best, r.reward);
  return best;
}

double EvalSummary::mean_steps() const {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const EvalRun& r : runs) sum += r.steps;
  return sum / static_cast<double>(runs.size());
}

EvalSummary evaluate_policy(const Network& net, Policy& policy, int runs,
                            int max_steps, double eval_eps, Rng& rng,
                            double scan_cost) {
  Environment env(net, scan_cost);
  EvalSummary out;
  out.runs.reserve(static_cast<std::size_t>(std::max(runs, 0)));
  for (int run = 0; run < runs; ++run) {
    env.reset();
    EvalRun row;
    while (row.steps < max_steps) {
      int action = 0;
      if (uniform_double(rng) < eval_eps)
        action = static_cast<int>(
            uniform_index(rng, static_cast<std::size_t>(env.num_actions())));
      else
        action = policy.select(env.state(), rng);
      const StepOutcome step = env.step(action, rng);
      row.reward += step.reward;
      ++row.steps;
      if (step.done) {
        row.solved = true;
        break;
      }
    }
    out.runs.push_back(row);
  }
  return out;
}

}  // namespace attacksim
