#include "attacksim/solvability.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>

namespace attacksim {

namespace {

// Source subnets are tracked as bits: bit 0 is the external network,
// bit s is real subnet s.
std::uint32_t source_bit(int subnet) { return 1u << subnet; }

struct Anchors {
  int num_subnets = 0;
  // For each target subnet, the set of source subnets (as bits) from
  // which at least one machine inside can be exploited directly.
  std::vector<std::uint32_t> entry_any;
  // Same per sensitive machine.
  std::vector<std::uint32_t> entry_machine;  // indexed like net.sensitive_machines()
  std::vector<std::uint8_t> runs_anything;   // per machine index
};

bool anchorable(const Network& net, int src, int dst, const Machine& m, int* service) {
  if (!net.subnets_connected(src, dst)) return false;
  for (int j = 0; j < net.num_services(); ++j) {
    if (m.runs(j) && net.traffic_permitted_index(src, dst, j)) {
      if (service) *service = j;
      return true;
    }
  }
  return false;
}

Anchors build_anchors(const Network& net) {
  const int n = net.num_subnets();
  Anchors a;
  a.num_subnets = n;
  a.entry_any.assign(static_cast<std::size_t>(n) + 1, 0);
  a.entry_machine.assign(net.sensitive_machines().size(), 0);
  a.runs_anything.assign(static_cast<std::size_t>(net.num_machines()), 0);
  for (int m = 0; m < net.num_machines(); ++m)
    for (int j = 0; j < net.num_services(); ++j)
      if (net.machine(m).runs(j)) {
        a.runs_anything[static_cast<std::size_t>(m)] = 1;
        break;
      }
  for (int dst = 1; dst <= n; ++dst) {
    for (int src = 0; src <= n; ++src) {
      if (src == dst) continue;
      for (int m : net.machines_in_subnet(dst)) {
        if (anchorable(net, src, dst, net.machine(m), nullptr)) {
          a.entry_any[static_cast<std::size_t>(dst)] |= source_bit(src);
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < net.sensitive_machines().size(); ++i) {
    const Machine& m = net.machine(net.sensitive_machines()[i]);
    for (int src = 0; src <= n; ++src) {
      if (src == m.address().subnet) continue;
      if (anchorable(net, src, m.address().subnet, m, nullptr))
        a.entry_machine[i] |= source_bit(src);
    }
  }
  return a;
}

WitnessStep make_step(const Network& net, int src, int machine) {
  int service = -1;
  const Machine& m = net.machine(machine);
  if (src == m.address().subnet) {
    for (int j = 0; j < net.num_services(); ++j)
      if (m.runs(j)) {
        service = j;
        break;
      }
  } else {
    anchorable(net, src, m.address().subnet, m, &service);
  }
  return {src, m.address(), service >= 0 ? net.service(service).id : std::string()};
}

int first_source(std::uint32_t sources) {
  for (int s = 0; s < 32; ++s)
    if (sources & (1u << s)) return s;
  return -1;
}

// Greedy subnet capture from the external network.  Produces a valid
// (not necessarily minimal) witness, the capture depth per subnet and
// the set of sensitive machines that can never be taken.
struct GreedyResult {
  std::vector<int> depth;  // per subnet id, -1 = never captured
  std::vector<WitnessStep> witness;
  std::vector<std::uint8_t> machine_taken;  // per sensitive list index
};

GreedyResult greedy_capture(const Network& net, const Anchors& anchors) {
  const int n = net.num_subnets();
  GreedyResult r;
  r.depth.assign(static_cast<std::size_t>(n) + 1, -1);
  r.depth[0] = 0;
  r.machine_taken.assign(net.sensitive_machines().size(), 0);

  // Breadth first layering over the entry relation: a subnet's depth
  // is the length of the shortest capture chain that reaches it.
  std::deque<int> queue;
  queue.push_back(0);
  while (!queue.empty()) {
    const int at = queue.front();
    queue.pop_front();
    for (int dst = 1; dst <= n; ++dst) {
      if (r.depth[static_cast<std::size_t>(dst)] >= 0) continue;
      if (anchors.entry_any[static_cast<std::size_t>(dst)] & source_bit(at)) {
        r.depth[static_cast<std::size_t>(dst)] = r.depth[static_cast<std::size_t>(at)] + 1;
        queue.push_back(dst);
      }
    }
  }

  // Witness: capture subnets in depth order, preferring a sensitive
  // machine as the entry foothold when one is directly exploitable.
  std::vector<int> order;
  for (int s = 1; s <= n; ++s)
    if (r.depth[static_cast<std::size_t>(s)] >= 0) order.push_back(s);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const int da = r.depth[static_cast<std::size_t>(a)];
    const int db = r.depth[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  });

  std::uint32_t captured = source_bit(0);
  for (int dst : order) {
    const std::uint32_t sources =
        anchors.entry_any[static_cast<std::size_t>(dst)] & captured;
    int foothold = -1;
    int src = -1;
    for (std::size_t i = 0; i < net.sensitive_machines().size(); ++i) {
      const int m = net.sensitive_machines()[i];
      if (net.machine(m).address().subnet != dst || r.machine_taken[i]) continue;
      if (const std::uint32_t direct = anchors.entry_machine[i] & sources) {
        foothold = m;
        src = first_source(direct);
        r.machine_taken[i] = 1;
        break;
      }
    }
    if (foothold < 0) {
      src = first_source(sources);
      for (int m : net.machines_in_subnet(dst))
        if (anchorable(net, src, dst, net.machine(m), nullptr)) {
          foothold = m;
          break;
        }
    }
    captured |= source_bit(dst);
    r.witness.push_back(make_step(net, src, foothold));
  }

  // Remaining sensitive machines fall to an exploit from inside their
  // own subnet once it is captured.
  for (std::size_t i = 0; i < net.sensitive_machines().size(); ++i) {
    if (r.machine_taken[i]) continue;
    const int m = net.sensitive_machines()[i];
    const int subnet = net.machine(m).address().subnet;
    if (r.depth[static_cast<std::size_t>(subnet)] >= 0 &&
        anchors.runs_anything[static_cast<std::size_t>(m)]) {
      r.witness.push_back(make_step(net, subnet, m));
      r.machine_taken[i] = 1;
    }
  }
  return r;
}

// Exhaustive minimum exploit search over (captured subnets, taken
// sensitive machines) states.  Each transition is one exploit.
struct ExactResult {
  bool reached = false;
  int min_exploits = 0;
  std::vector<WitnessStep> witness;
};

std::optional<ExactResult> exact_minimum(const Network& net, const Anchors& anchors) {
  const int n = net.num_subnets();
  const int k = static_cast<int>(net.sensitive_machines().size());
  if (n + k > 20 || n >= 31) return std::nullopt;

  const std::uint32_t states = 1u << (n + k);
  const std::uint32_t goal_sens = (1u << k) - 1;
  auto encode = [&](std::uint32_t subnet_mask, std::uint32_t sens_mask) {
    return (subnet_mask << k) | sens_mask;
  };
  auto subnet_part = [&](std::uint32_t st) { return st >> k; };
  auto sens_part = [&](std::uint32_t st) { return st & goal_sens; };
  // Source bits for a state: external plus every captured subnet.
  auto sources_of = [&](std::uint32_t st) {
    return (subnet_part(st) << 1) | 1u;
  };

  std::vector<std::int8_t> dist(states, -1);
  std::vector<std::uint32_t> prev(states, 0);
  std::vector<std::int32_t> prev_machine(states, -1);
  std::vector<std::int16_t> prev_subnet(states, -1);

  std::deque<std::uint32_t> queue;
  dist[0] = 0;
  queue.push_back(0);
  std::optional<std::uint32_t> goal_state;
  if (k == 0) goal_state = 0;

  while (!queue.empty() && !goal_state) {
    const std::uint32_t at = queue.front();
    queue.pop_front();
    const std::uint32_t srcs = sources_of(at);
    auto visit = [&](std::uint32_t next, int via_subnet, int via_machine) {
      if (dist[next] >= 0) return;
      dist[next] = static_cast<std::int8_t>(dist[at] + 1);
      prev[next] = at;
      prev_subnet[next] = static_cast<std::int16_t>(via_subnet);
      prev_machine[next] = via_machine;
      if (sens_part(next) == goal_sens && !goal_state) goal_state = next;
      queue.push_back(next);
    };
    for (int dst = 1; dst <= n && !goal_state; ++dst) {
      const std::uint32_t dst_bit = 1u << (dst - 1);
      if (subnet_part(at) & dst_bit) continue;
      if (!(anchors.entry_any[static_cast<std::size_t>(dst)] & srcs)) continue;
      visit(encode(subnet_part(at) | dst_bit, sens_part(at)), dst, -1);
      for (int i = 0; i < k && !goal_state; ++i) {
        const int m = net.sensitive_machines()[static_cast<std::size_t>(i)];
        if (net.machine(m).address().subnet != dst) continue;
        if (sens_part(at) & (1u << i)) continue;
        if (anchors.entry_machine[static_cast<std::size_t>(i)] & srcs)
          visit(encode(subnet_part(at) | dst_bit, sens_part(at) | (1u << i)), dst, m);
      }
    }
    for (int i = 0; i < k && !goal_state; ++i) {
      if (sens_part(at) & (1u << i)) continue;
      const int m = net.sensitive_machines()[static_cast<std::size_t>(i)];
      const int subnet = net.machine(m).address().subnet;
      if (!(subnet_part(at) & (1u << (subnet - 1)))) continue;
      if (!anchors.runs_anything[static_cast<std::size_t>(m)]) continue;
      visit(encode(subnet_part(at), sens_part(at) | (1u << i)), -1, m);
    }
  }

  ExactResult result;
  if (!goal_state) return result;  // searched everything, goal unreachable
  result.reached = true;
  result.min_exploits = dist[*goal_state];

  // Walk back through the parent links to realize concrete exploits.
  std::vector<WitnessStep> steps;
  std::uint32_t at = *goal_state;
  while (at != 0) {
    const std::uint32_t before = prev[at];
    const int via_subnet = prev_subnet[at];
    const int via_machine = prev_machine[at];
    if (via_subnet >= 1) {
      // Entering a new subnet; pick a concrete source and foothold.
      std::uint32_t srcs = sources_of(before);
      int machine = via_machine;
      if (machine >= 0) {
        for (std::size_t i = 0; i < net.sensitive_machines().size(); ++i)
          if (net.sensitive_machines()[i] == machine)
            srcs &= anchors.entry_machine[i];
        const int src = first_source(srcs);
        steps.push_back(make_step(net, src, machine));
      } else {
        srcs &= anchors.entry_any[static_cast<std::size_t>(via_subnet)];
        const int src = first_source(srcs);
        for (int m : net.machines_in_subnet(via_subnet))
          if (anchorable(net, src, via_subnet, net.machine(m), nullptr)) {
            machine = m;
            break;
          }
        steps.push_back(make_step(net, src, machine));
      }
    } else {
      steps.push_back(make_step(net, net.machine(via_machine).address().subnet, via_machine));
    }
    at = before;
  }
  std::reverse(steps.begin(), steps.end());
  result.witness = std::move(steps);
  return result;
}

}  // namespace

SolvabilityReport solvability_oracle(const Network& net) {
  SolvabilityReport report;
  const Anchors anchors = build_anchors(net);
  const GreedyResult greedy = greedy_capture(net, anchors);

  for (std::size_t i = 0; i < net.sensitive_machines().size(); ++i)
    if (!greedy.machine_taken[i])
      report.unreachable_sensitive.push_back(
          net.machine(net.sensitive_machines()[i]).address());
  report.solvable = report.unreachable_sensitive.empty();
  if (!report.solvable) return report;

  if (const auto exact = exact_minimum(net, anchors); exact && exact->reached) {
    report.min_exploits = exact->min_exploits;
    report.witness = exact->witness;
    report.exact = true;
    return report;
  }

  // Too large to search exhaustively: report the greedy witness and a
  // lower bound on the exploit count (every sensitive machine needs
  // its own exploit, and the deepest sensitive subnet needs a capture
  // chain at least as long as its breadth first layer).
  report.exact = false;
  int bound = static_cast<int>(net.sensitive_machines().size());
  for (int m : net.sensitive_machines())
    bound = std::max(bound, greedy.depth[static_cast<std::size_t>(
                                net.machine(m).address().subnet)]);
  report.min_exploits = bound;
  report.witness = greedy.witness;
  return report;
}

double theoretical_max_return(const Network& net, const SolvabilityReport& report) {
  return net.total_sensitive_value() -
         static_cast<double>(report.min_exploits) * net.min_exploit_cost();
}

}  // namespace attacksim
