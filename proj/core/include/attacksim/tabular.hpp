#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "attacksim/network.hpp"
#include "attacksim/rng.hpp"
#include "attacksim/state.hpp"

namespace attacksim {

struct TabularHyperparams {
  double step_size = 0.1;
  double discount = 0.99;
  double eps_max = 1.0;
  double eps_min = 0.05;
  double eps_decay = 1.0e-4;  // decay rate over cumulative env steps
  double ucb_c = 0.5;
};

// Action value table keyed by canonical state keys.  Unseen states
// read as all-zero rows without being inserted.
class QTable {
 public:
  explicit QTable(int num_actions);

  int num_actions() const { return num_actions_; }
  std::size_t size() const { return rows_.size(); }

  std::span<const double> row(const std::string& key) const;
  std::span<double> row_mut(const std::string& key);

  // Flat text serialization: a header line, then one line per state
  // holding the key and its action values.
  void save(std::ostream& out) const;
  static QTable load(std::istream& in);

  bool operator==(const QTable& other) const;

 private:
  int num_actions_ = 0;
  std::vector<double> zeros_;
  std::unordered_map<std::string, std::vector<double>> rows_;
};

// Per state visit statistics for the upper confidence bound agent.
class VisitCounts {
 public:
  explicit VisitCounts(int num_actions);

  std::span<const std::uint32_t> row(const std::string& key) const;
  std::uint64_t state_total(const std::string& key) const;
  void record(const std::string& key, int action);

 private:
  struct Entry {
    std::uint64_t total = 0;
    std::vector<std::uint32_t> per_action;
  };
  int num_actions_ = 0;
  std::vector<std::uint32_t> zeros_;
  std::unordered_map<std::string, Entry> rows_;
};

// Index of the largest value; earlier index wins ties.
int argmax_lowest(std::span<const double> values);

// With probability eps a uniformly random index, otherwise the
// greedy index.
int epsilon_greedy_select(std::span<const double> qrow, double eps, Rng& rng);

// Exponentially decaying exploration rate after t environment steps:
// eps_min + (eps_max - eps_min) * exp(-eps_decay * t).
double epsilon_decay(std::uint64_t t, const TabularHyperparams& h);

// Picks the action maximizing q + c * sqrt(ln(state_total) / count).
// Actions never tried in this state come first (lowest index wins).
int ucb_select(std::span<const double> qrow, std::span<const std::uint32_t> counts,
               std::uint64_t state_total, double c);

// One temporal difference backup:
// q[a] += step_size * (reward + discount * max(next) - q[a]),
// where the lookahead term is zero on terminal transitions.
void q_update(std::span<double> qrow, int action, double reward,
              std::span<const double> next_qrow, bool terminal,
              const TabularHyperparams& h);

struct EpisodeRow {
  std::uint64_t episode = 0;
  int steps = 0;
  double reward = 0.0;
  std::uint64_t cum_steps = 0;
  double wall_clock_s = 0.0;
};

// Mean reward over the last `window` episodes of a training log.
double smoothed_reward(std::span<const EpisodeRow> log, std::size_t window = 100);

enum class TabularAgentKind { EpsilonGreedy, Ucb };

// Stopping rules for a training run.  The wall clock budget is
// checked at episode boundaries, so a run can overshoot by at most
// one episode.  A non-positive budget trains nothing.  max_episodes
// gives fully reproducible runs; stop_reward ends training once the
// smoothed mean episode reward reaches the goal.
struct TrainBudget {
  double budget_secs = 120.0;
  std::optional<std::uint64_t> max_episodes;
  std::optional<double> stop_reward;
};

struct TabularTrainResult {
  QTable qtable;
  VisitCounts counts;
  std::vector<EpisodeRow> log;
  std::uint64_t cum_steps = 0;
  double wall_clock_s = 0.0;
};

TabularTrainResult train_tabular(const Network& net, TabularAgentKind kind,
                                 const TabularHyperparams& h,
                                 const TrainBudget& budget, int max_steps,
                                 Rng& rng, double scan_cost = 1.0);

}  // namespace attacksim
