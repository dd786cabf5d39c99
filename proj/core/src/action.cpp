#include "attacksim/action.hpp"

namespace attacksim {

std::vector<Action> action_space(const Network& net, double scan_cost) {
  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>(net.num_machines()) *
              (static_cast<std::size_t>(net.num_services()) + 1));
  for (const Machine& m : net.machines()) {
    Action scan;
    scan.target = m.address();
    scan.kind = ActionKind::Scan;
    scan.service = -1;
    scan.cost = scan_cost;
    scan.prob = 1.0;
    out.push_back(scan);
    for (int j = 0; j < net.num_services(); ++j) {
      Action exploit;
      exploit.target = m.address();
      exploit.kind = ActionKind::Exploit;
      exploit.service = j;
      exploit.cost = net.service(j).exploit_cost;
      exploit.prob = net.service(j).exploit_prob;
      out.push_back(exploit);
    }
  }
  return out;
}

std::string to_string(const Action& a, const Network& net) {
  if (a.kind == ActionKind::Scan) return "scan " + to_string(a.target);
  return "exploit " + net.service(a.service).id + " on " + to_string(a.target);
}

}  // namespace attacksim
