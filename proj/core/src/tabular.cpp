#include "attacksim/tabular.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "attacksim/environment.hpp"
#include "attacksim/errors.hpp"

namespace attacksim {

QTable::QTable(int num_actions)
    : num_actions_(num_actions), zeros_(static_cast<std::size_t>(num_actions), 0.0) {
  if (num_actions <= 0) throw Error("qtable: need at least one action");
}

std::span<const double> QTable::row(const std::string& key) const {
  auto it = rows_.find(key);
  if (it == rows_.end()) return zeros_;
  return it->second;
}

std::span<double> QTable::row_mut(const std::string& key) {
  auto [it, fresh] = rows_.try_emplace(key);
  if (fresh) it->second.assign(static_cast<std::size_t>(num_actions_), 0.0);
  return it->second;
}

void QTable::save(std::ostream& out) const {
  out << "qtable " << num_actions_ << ' ' << rows_.size() << '\n';
  out.precision(17);
  // Sort keys so equal tables serialize identically.
  std::vector<const std::string*> keys;
  keys.reserve(rows_.size());
  for (const auto& [key, vals] : rows_) keys.push_back(&key);
  std::sort(keys.begin(), keys.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const std::string* key : keys) {
    out << *key;
    for (double v : rows_.at(*key)) out << ' ' << v;
    out << '\n';
  }
}

QTable QTable::load(std::istream& in) {
  std::string magic;
  int num_actions = 0;
  std::size_t num_rows = 0;
  if (!(in >> magic >> num_actions >> num_rows) || magic != "qtable")
    throw ParseError("qtable: bad header");
  QTable table(num_actions);
  for (std::size_t i = 0; i < num_rows; ++i) {
    std::string key;
    if (!(in >> key)) throw ParseError("qtable: truncated file");
    auto row = table.row_mut(key);
    for (int a = 0; a < num_actions; ++a) {
      if (!(in >> row[static_cast<std::size_t>(a)]))
        throw ParseError("qtable: truncated row");
    }
  }
  return table;
}

bool QTable::operator==(const QTable& other) const {
  return num_actions_ == other.num_actions_ && rows_ == other.rows_;
}

VisitCounts::VisitCounts(int num_actions)
    : num_actions_(num_actions), zeros_(static_cast<std::size_t>(num_actions), 0) {
  if (num_actions <= 0) throw Error("visit counts: need at least one action");
}

std::span<const std::uint32_t> VisitCounts::row(const std::string& key) const {
  auto it = rows_.find(key);
  if (it == rows_.end()) return zeros_;
  return it->second.per_action;
}

std::uint64_t VisitCounts::state_total(const std::string& key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? 0 : it->second.total;
}

void VisitCounts::record(const std::string& key, int action) {
  auto [it, fresh] = rows_.try_emplace(key);
  if (fresh) it->second.per_action.assign(static_cast<std::size_t>(num_actions_), 0);
  it->second.total += 1;
  it->second.per_action[static_cast<std::size_t>(action)] += 1;
}

int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw Error("argmax over empty range");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)])
      best = i;
  }
  return best;
}

int epsilon_greedy_select(std::span<const double> qrow, double eps, Rng& rng) {
  if (uniform_double(rng) < eps)
    return static_cast<int>(uniform_index(rng, qrow.size()));
  return argmax_lowest(qrow);
}

double epsilon_decay(std::uint64_t t, const TabularHyperparams& h) {
  return h.eps_min +
         (h.eps_max - h.eps_min) * std::exp(-h.eps_decay * static_cast<double>(t));
}

int ucb_select(std::span<const double> qrow, std::span<const std::uint32_t> counts,
               std::uint64_t state_total, double c) {
  if (qrow.size() != counts.size()) throw Error("ucb: row size mismatch");
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  const double log_total =
      state_total > 0 ? std::log(static_cast<double>(state_total)) : 0.0;
  for (int i = 0; i < static_cast<int>(qrow.size()); ++i) {
    const auto n = counts[static_cast<std::size_t>(i)];
    if (n == 0) return i;  // untried action has an infinite bonus
    const double score = qrow[static_cast<std::size_t>(i)] +
                         c * std::sqrt(log_total / static_cast<double>(n));
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

void q_update(std::span<double> qrow, int action, double reward,
              std::span<const double> next_qrow, bool terminal,
              const TabularHyperparams& h) {
  const double lookahead =
      terminal ? 0.0 : next_qrow[static_cast<std::size_t>(argmax_lowest(next_qrow))];
  double& q = qrow[static_cast<std::size_t>(action)];
  q += h.step_size * (reward + h.discount * lookahead - q);
}

double smoothed_reward(std::span<const EpisodeRow> log, std::size_t window) {
  if (log.empty()) return 0.0;
  const std::size_t n = std::min(window, log.size());
  double sum = 0.0;
  for (std::size_t i = log.size() - n; i < log.size(); ++i) sum += log[i].reward;
  return sum / static_cast<double>(n);
}

TabularTrainResult train_tabular(const Network& net, TabularAgentKind kind,
                                 const TabularHyperparams& h,
                                 const TrainBudget& budget, int max_steps, Rng& rng,
                                 double scan_cost) {
  Environment env(net, scan_cost);
  TabularTrainResult out{QTable(env.num_actions()), VisitCounts(env.num_actions()),
                         {}, 0, 0.0};

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };

  for (std::uint64_t episode = 0;; ++episode) {
    if (budget.max_episodes && episode >= *budget.max_episodes) break;
    if (elapsed() >= budget.budget_secs) break;
    if (budget.stop_reward &&
        !out.log.empty() && smoothed_reward(out.log) >= *budget.stop_reward)
      break;

    env.reset();
    double episode_reward = 0.0;
    int steps = 0;
    std::string key = canonical_key(env.state());
    while (steps < max_steps) {
      int action = -1;
      if (kind == TabularAgentKind::EpsilonGreedy) {
        const double eps = epsilon_decay(out.cum_steps, h);
        action = epsilon_greedy_select(out.qtable.row(key), eps, rng);
      } else {
        action = ucb_select(out.qtable.row(key), out.counts.row(key),
                            out.counts.state_total(key), h.ucb_c);
      }
      out.counts.record(key, action);

      const StepOutcome step = env.step(action, rng);
      std::string next_key = canonical_key(env.state());
      q_update(out.qtable.row_mut(key), action, step.reward,
               out.qtable.row(next_key), step.done, h);

      episode_reward += step.reward;
      ++steps;
      ++out.cum_steps;
      key = std::move(next_key);
      if (step.done) break;
    }
    out.log.push_back(EpisodeRow{episode, steps, episode_reward, out.cum_steps,
                                 elapsed()});
  }

  out.wall_clock_s = elapsed();
  return out;
}

}  // namespace attacksim
