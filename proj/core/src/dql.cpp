#include "attacksim/dql.hpp"

#include <chrono>
#include <cmath>

#include "attacksim/environment.hpp"
#include "attacksim/errors.hpp"

namespace attacksim {

int state_vector_size(const Network& net) {
  return net.num_machines() * (2 + net.num_services());
}

template <typename T>
void vectorize_state(const Network& net, const State& s, std::span<T> out) {
  const int m = net.num_machines();
  const int e = net.num_services();
  if (static_cast<int>(out.size()) != m * (2 + e))
    throw Error("vectorize: output size mismatch");
  std::size_t i = 0;
  for (int machine = 0; machine < m; ++machine) {
    out[i++] = s.compromised(machine) ? T(1) : T(0);
    out[i++] = s.reachable(machine) ? T(1) : T(0);
    for (int svc = 0; svc < e; ++svc)
      out[i++] = static_cast<T>(static_cast<int>(s.knowledge(machine, svc)));
  }
}

template <typename T>
std::vector<T> vectorize_state(const Network& net, const State& s) {
  std::vector<T> out(static_cast<std::size_t>(state_vector_size(net)));
  vectorize_state<T>(net, s, out);
  return out;
}

template <typename T>
State devectorize_state(const Network& net, std::span<const T> x) {
  const int m = net.num_machines();
  const int e = net.num_services();
  if (static_cast<int>(x.size()) != m * (2 + e))
    throw Error("devectorize: input size mismatch");
  State s(m, e);
  std::size_t i = 0;
  for (int machine = 0; machine < m; ++machine) {
    if (x[i++] > T(0.5)) s.set_compromised(machine);
    if (x[i++] > T(0.5)) s.set_reachable(machine);
    for (int svc = 0; svc < e; ++svc) {
      const T v = x[i++];
      if (v > T(0.5))
        s.set_knowledge(machine, svc, Knowledge::Present);
      else if (v < T(-0.5))
        s.set_knowledge(machine, svc, Knowledge::Absent);
    }
  }
  return s;
}

template <typename T>
std::vector<T> td_targets(const QNetworkT<T>& target_net, const ReplayBuffer& buffer,
                          std::span<const std::size_t> batch, double discount) {
  std::vector<T> y(batch.size());
  std::vector<T> hidden(static_cast<std::size_t>(target_net.hidden_dim));
  std::vector<T> q(static_cast<std::size_t>(target_net.out_dim));
  std::vector<T> next(static_cast<std::size_t>(target_net.in_dim));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Transition& t = buffer.at(batch[j]);
    if (t.done) {
      y[j] = static_cast<T>(t.reward);
      continue;
    }
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = static_cast<T>(t.next_state[i]);
    target_net.forward_cached(next, hidden, q);
    T best = q[0];
    for (std::size_t a = 1; a < q.size(); ++a)
      if (q[a] > best) best = q[a];
    y[j] = static_cast<T>(t.reward) + static_cast<T>(discount) * best;
  }
  return y;
}

namespace {

int argmax_float(std::span<const float> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)])
      best = i;
  return best;
}

}  // namespace

DqlTrainResult train_dql(const Network& net, const DqlHyperparams& h,
                         const TrainBudget& budget, int max_steps, Rng& rng,
                         double scan_cost) {
  if (h.minibatch <= 0 || static_cast<std::size_t>(h.minibatch) > h.replay_capacity)
    throw ParamError("dql: minibatch must fit in the replay buffer");
  Environment env(net, scan_cost);
  const int in_dim = state_vector_size(net);
  const int out_dim = env.num_actions();

  DqlTrainResult out;
  out.net = QNetworkT<float>::xavier(in_dim, h.hidden, out_dim, rng);
  QNetworkT<float> target = out.net;
  RmspropState<float> opt = RmspropState<float>::zeros_like(out.net);
  QNetGrad<float> grad = QNetGrad<float>::zeros_like(out.net);
  ReplayBuffer buffer(h.replay_capacity);

  const std::size_t batch_size = static_cast<std::size_t>(h.minibatch);
  std::vector<float> batch_states(batch_size * static_cast<std::size_t>(in_dim));
  std::vector<int> batch_actions(batch_size);
  std::vector<float> hidden(static_cast<std::size_t>(h.hidden));
  std::vector<float> q(static_cast<std::size_t>(out_dim));
  std::vector<float> vec_state(static_cast<std::size_t>(in_dim));

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };

  for (std::uint64_t episode = 0;; ++episode) {
    if (budget.max_episodes && episode >= *budget.max_episodes) break;
    if (elapsed() >= budget.budget_secs) break;
    if (budget.stop_reward && !out.log.empty() &&
        smoothed_reward(out.log) >= *budget.stop_reward)
      break;

    env.reset();
    vectorize_state<float>(net, env.state(), vec_state);
    double episode_reward = 0.0;
    int steps = 0;
    while (steps < max_steps) {
      const double eps =
          h.eps_min + (h.eps_max - h.eps_min) *
                          std::exp(-h.eps_decay * static_cast<double>(out.cum_steps));
      int action = 0;
      if (uniform_double(rng) < eps) {
        action = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(out_dim)));
      } else {
        out.net.forward_cached(vec_state, hidden, q);
        action = argmax_float(q);
      }

      const StepOutcome step = env.step(action, rng);
      Transition t;
      t.state = vec_state;
      t.action = action;
      t.reward = static_cast<float>(step.reward);
      t.next_state.resize(vec_state.size());
      vectorize_state<float>(net, env.state(), t.next_state);
      t.done = step.done;
      vec_state = t.next_state;
      buffer.push(std::move(t));

      if (buffer.size() >= batch_size) {
        const std::vector<std::size_t> picks = buffer.sample_indices(rng, batch_size);
        for (std::size_t j = 0; j < batch_size; ++j) {
          const Transition& sample = buffer.at(picks[j]);
          std::copy(sample.state.begin(), sample.state.end(),
                    batch_states.begin() + static_cast<std::ptrdiff_t>(
                                               j * static_cast<std::size_t>(in_dim)));
          batch_actions[j] = sample.action;
        }
        const std::vector<float> y = td_targets<float>(target, buffer, picks, h.discount);
        batch_loss_grad<float>(out.net, batch_states, batch_actions, y, grad);
        rmsprop_step<float>(out.net, grad, opt, h.lr, h.rmsprop_rho, h.rmsprop_eps);
        ++out.updates;
      }

      episode_reward += step.reward;
      ++steps;
      ++out.cum_steps;
      if (out.cum_steps % h.target_sync_every == 0) {
        target = out.net;
        ++out.target_syncs;
      }
      if (step.done) break;
    }
    out.log.push_back(
        EpisodeRow{episode, steps, episode_reward, out.cum_steps, elapsed()});
  }

  out.wall_clock_s = elapsed();
  return out;
}

template void vectorize_state<float>(const Network&, const State&, std::span<float>);
template void vectorize_state<double>(const Network&, const State&, std::span<double>);
template std::vector<float> vectorize_state<float>(const Network&, const State&);
template std::vector<double> vectorize_state<double>(const Network&, const State&);
template State devectorize_state<float>(const Network&, std::span<const float>);
template State devectorize_state<double>(const Network&, std::span<const double>);
template std::vector<float> td_targets<float>(const QNetworkT<float>&,
                                              const ReplayBuffer&,
                                              std::span<const std::size_t>, double);

}  // namespace attacksim
