#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "attacksim/action.hpp"
#include "attacksim/network.hpp"
#include "attacksim/rng.hpp"
#include "attacksim/state.hpp"

namespace attacksim {

struct StepResult {
  State next;
  double reward = 0.0;
  bool done = false;
};

// Wrapper result without the state copy; the new state is available
// through Environment::state().
struct StepOutcome {
  double reward = 0.0;
  bool done = false;
};

// Fresh attacker view: nothing compromised, all knowledge unknown,
// and exactly the machines whose subnet has a direct link to the
// external network marked reachable.
State reset(const Network& net);

// Marks machines reachable under the current compromised set: a
// machine can be reached when its subnet touches the external
// network, or touches (or is) a subnet holding a compromised machine.
// Previously reachable machines always stay reachable.
State recompute_reachability(const Network& net, State s);

// True when an exploit can be attempted at all: the target is
// reachable, actually runs the service, and the service is permitted
// along some route (from inside the target's subnet, from the
// external network when the subnet is public, or from a subnet
// holding a compromised machine).  Success is then still up to the
// exploit's probability.
bool exploit_feasible(const Network& net, const State& s, const Action& a);

bool all_sensitive_compromised(const Network& net, const State& s);

// One transition of the simulated attack.  Scans reveal the target's
// full service list when it is reachable.  Feasible exploits succeed
// with the exploit's probability; success compromises the target,
// records the service as present and banks the machine's value if it
// was not already compromised.  Every attempt costs the action's
// cost, and failed or infeasible attempts reveal nothing.  Once every
// sensitive machine is compromised the episode is done and further
// steps leave the state untouched while still costing the action.
// Throws InvalidActionError for actions outside the action space.
StepResult step(const Network& net, const State& s, const Action& a, Rng& rng);

// Upper bound on the attacker state count:
// (2 * 2 * 3^services) ^ machines.
boost::multiprecision::cpp_int state_space_size_bound(const Network& net);

// Owns a network's action space plus the current attacker state; the
// convenience wrapper used by agents and the command line tools.
class Environment {
 public:
  explicit Environment(const Network& net, double scan_cost = 1.0);

  const Network& network() const { return *net_; }
  const std::vector<Action>& actions() const { return actions_; }
  int num_actions() const { return static_cast<int>(actions_.size()); }
  const State& state() const { return state_; }
  bool done() const { return done_; }

  const State& reset();
  StepOutcome step(int action_index, Rng& rng);

 private:
  const Network* net_;
  std::vector<Action> actions_;
  State state_;
  bool done_ = false;
};

}  // namespace attacksim
