#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "attacksim/network.hpp"
#include "attacksim/qnetwork.hpp"
#include "attacksim/replay.hpp"
#include "attacksim/rng.hpp"
#include "attacksim/state.hpp"
#include "attacksim/tabular.hpp"

namespace attacksim {

struct DqlHyperparams {
  double discount = 0.99;
  double eps_max = 1.0;
  double eps_min = 0.05;
  double eps_decay = 1.0e-4;
  int minibatch = 32;
  int hidden = 256;
  std::size_t replay_capacity = 10000;
  std::uint64_t target_sync_every = 1000;  // environment steps between syncs
  float lr = 0.00025f;
  float rmsprop_rho = 0.9f;
  float rmsprop_eps = 1.0e-8f;
};

// Flat encoding length: machines * (2 + services).
int state_vector_size(const Network& net);

// Per machine in address order: compromised 0/1, reachable 0/1, then
// one entry per service: 1 present, -1 absent, 0 unknown.
template <typename T>
void vectorize_state(const Network& net, const State& s, std::span<T> out);

template <typename T>
std::vector<T> vectorize_state(const Network& net, const State& s);

template <typename T>
State devectorize_state(const Network& net, std::span<const T> x);

// y = reward for terminal transitions, else
// reward + discount * max_a q_target(next_state)[a].
template <typename T>
std::vector<T> td_targets(const QNetworkT<T>& target_net,
                          const ReplayBuffer& buffer,
                          std::span<const std::size_t> batch, double discount);

struct DqlTrainResult {
  QNetworkT<float> net;
  std::vector<EpisodeRow> log;
  std::uint64_t cum_steps = 0;
  std::uint64_t updates = 0;
  std::uint64_t target_syncs = 0;
  double wall_clock_s = 0.0;
};

// Deep Q-learning with experience replay and a periodically synced
// target network.  Action selection is eps-greedy over the online
// network's outputs with the same exploration decay as the tabular
// agents; learning starts once the buffer holds a full minibatch;
// the target network is copied bit for bit from the online one every
// target_sync_every environment steps.
DqlTrainResult train_dql(const Network& net, const DqlHyperparams& h,
                         const TrainBudget& budget, int max_steps, Rng& rng,
                         double scan_cost = 1.0);

extern template void vectorize_state<float>(const Network&, const State&,
                                            std::span<float>);
extern template void vectorize_state<double>(const Network&, const State&,
                                             std::span<double>);
extern template std::vector<float> vectorize_state<float>(const Network&, const State&);
extern template std::vector<double> vectorize_state<double>(const Network&,
                                                            const State&);
extern template State devectorize_state<float>(const Network&, std::span<const float>);
extern template State devectorize_state<double>(const Network&,
                                                std::span<const double>);
extern template std::vector<float> td_targets<float>(const QNetworkT<float>&,
                                                     const ReplayBuffer&,
                                                     std::span<const std::size_t>,
                                                     double);

}  // namespace attacksim
