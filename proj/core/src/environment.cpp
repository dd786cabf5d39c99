#include "attacksim/environment.hpp"

namespace attacksim {

namespace {

// One flag per subnet id (0..n) telling whether it holds a
// compromised machine.
std::vector<std::uint8_t> compromised_subnets(const Network& net, const State& s) {
  std::vector<std::uint8_t> holds(static_cast<std::size_t>(net.num_subnets()) + 1, 0);
  for (int m = 0; m < net.num_machines(); ++m)
    if (s.compromised(m))
      holds[static_cast<std::size_t>(net.machine(m).address().subnet)] = 1;
  return holds;
}

void apply_reachability(const Network& net, State& s) {
  const std::vector<std::uint8_t> holds = compromised_subnets(net, s);
  for (int m = 0; m < net.num_machines(); ++m) {
    if (s.reachable(m)) continue;
    const int subnet = net.machine(m).address().subnet;
    if (net.subnets_connected(0, subnet)) {
      s.set_reachable(m);
      continue;
    }
    for (int src = 1; src <= net.num_subnets(); ++src) {
      if (holds[static_cast<std::size_t>(src)] && net.subnets_connected(src, subnet)) {
        s.set_reachable(m);
        break;
      }
    }
  }
}

int checked_target_index(const Network& net, const Action& a) {
  const auto index = net.machine_index(a.target);
  if (!index)
    throw InvalidActionError("action targets unknown machine " + to_string(a.target));
  if (a.kind == ActionKind::Scan) {
    if (a.service != -1)
      throw InvalidActionError("scan actions carry no service");
  } else {
    if (a.service < 0 || a.service >= net.num_services())
      throw InvalidActionError("exploit action references service index " +
                               std::to_string(a.service) +
                               " outside the service list");
  }
  return *index;
}

}  // namespace

State reset(const Network& net) {
  State s(net.num_machines(), net.num_services());
  apply_reachability(net, s);
  return s;
}

State recompute_reachability(const Network& net, State s) {
  apply_reachability(net, s);
  return s;
}

bool exploit_feasible(const Network& net, const State& s, const Action& a) {
  const auto index = net.machine_index(a.target);
  if (!index || a.kind != ActionKind::Exploit) return false;
  const int target = *index;
  if (!s.reachable(target)) return false;
  if (!net.machine(target).runs(a.service)) return false;

  const int subnet = a.target.subnet;
  const std::vector<std::uint8_t> holds = compromised_subnets(net, s);
  // A compromised neighbour inside the target's own subnet bypasses
  // every firewall.
  if (holds[static_cast<std::size_t>(subnet)]) return true;
  if (net.subnets_connected(0, subnet) &&
      net.traffic_permitted_index(0, subnet, a.service))
    return true;
  for (int src = 1; src <= net.num_subnets(); ++src) {
    if (!holds[static_cast<std::size_t>(src)]) continue;
    if (net.subnets_connected(src, subnet) &&
        net.traffic_permitted_index(src, subnet, a.service))
      return true;
  }
  return false;
}

bool all_sensitive_compromised(const Network& net, const State& s) {
  for (int m : net.sensitive_machines())
    if (!s.compromised(m)) return false;
  return true;
}

StepResult step(const Network& net, const State& s, const Action& a, Rng& rng) {
  const int target = checked_target_index(net, a);
  if (all_sensitive_compromised(net, s)) return {s, -a.cost, true};

  if (a.kind == ActionKind::Scan) {
    if (!s.reachable(target)) return {s, -a.cost, false};
    State next = s;
    for (int j = 0; j < net.num_services(); ++j)
      next.set_knowledge(target, j,
                         net.machine(target).runs(j) ? Knowledge::Present
                                                     : Knowledge::Absent);
    return {std::move(next), -a.cost, false};
  }

  if (!exploit_feasible(net, s, a)) return {s, -a.cost, false};
  if (uniform_double(rng) >= a.prob) return {s, -a.cost, false};

  State next = s;
  const bool newly = !next.compromised(target);
  next.set_compromised(target);
  next.set_knowledge(target, a.service, Knowledge::Present);
  if (newly) apply_reachability(net, next);
  const double reward = (newly ? net.machine(target).value() : 0.0) - a.cost;
  const bool done = all_sensitive_compromised(net, next);
  return {std::move(next), reward, done};
}

boost::multiprecision::cpp_int state_space_size_bound(const Network& net) {
  namespace mp = boost::multiprecision;
  const mp::cpp_int per_machine =
      4 * mp::pow(mp::cpp_int(3), static_cast<unsigned>(net.num_services()));
  return mp::pow(per_machine, static_cast<unsigned>(net.num_machines()));
}

Environment::Environment(const Network& net, double scan_cost)
    : net_(&net), actions_(action_space(net, scan_cost)), state_(attacksim::reset(net)) {
  done_ = all_sensitive_compromised(net, state_);
}

const State& Environment::reset() {
  state_ = attacksim::reset(*net_);
  done_ = all_sensitive_compromised(*net_, state_);
  return state_;
}

StepOutcome Environment::step(int action_index, Rng& rng) {
  if (action_index < 0 || action_index >= static_cast<int>(actions_.size()))
    throw InvalidActionError("action index " + std::to_string(action_index) +
                             " outside the action space");
  StepResult result =
      attacksim::step(*net_, state_, actions_[static_cast<std::size_t>(action_index)], rng);
  state_ = std::move(result.next);
  done_ = result.done;
  return {result.reward, result.done};
}

}  // namespace attacksim
