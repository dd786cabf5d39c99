#pragma once

#include <span>
#include <string>

#include "attacksim/action.hpp"
#include "attacksim/network.hpp"
#include "attacksim/state.hpp"

namespace attacksim {

// One executed step of an episode: the action taken, the reward it
// earned and the state it produced.
struct EpisodeStep {
  State after;
  Action action;
  double reward = 0.0;
};

struct TraceOutput {
  // One JSON object per line with fields t, action_target,
  // action_kind, service, reward, done, plus the per machine changes
  // the step caused.
  std::string records;
  // The network and final attacker state as a Graphviz document:
  // compromised machines black, sensitive targets pink, reachable
  // machines blue, the rest red.
  std::string dot;
};

TraceOutput render_trace(const Network& net, const State& initial,
                         std::span<const EpisodeStep> steps);

}  // namespace attacksim
