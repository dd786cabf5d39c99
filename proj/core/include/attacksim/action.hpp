#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attacksim/address.hpp"
#include "attacksim/network.hpp"

namespace attacksim {

enum class ActionKind : std::uint8_t { Scan, Exploit };

// One attacker action against one machine.  Cost and success
// probability are copied out of the network definition so a row of
// the action space is self contained.  Scans carry service -1.
struct Action {
  Address target;
  ActionKind kind = ActionKind::Scan;
  int service = -1;
  double cost = 0.0;
  double prob = 1.0;

  bool operator==(const Action&) const = default;
};

// Full action list for a network: machines in address order, each
// contributing its scan followed by one exploit per service in
// service list order.  Size is machines * (services + 1).  This
// ordering is the shared contract between the tabular and deep
// agents' action indices.
std::vector<Action> action_space(const Network& net, double scan_cost = 1.0);

std::string to_string(const Action& a, const Network& net);

}  // namespace attacksim
