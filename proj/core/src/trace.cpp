#include "attacksim/trace.hpp"

#include <json.hpp>
#include <sstream>

#include "attacksim/environment.hpp"

namespace attacksim {

namespace {

using json = nlohmann::ordered_json;

json state_delta(const Network& net, const State& before, const State& after) {
  json compromised = json::array();
  json reachable = json::array();
  json discovered = json::object();
  for (int m = 0; m < net.num_machines(); ++m) {
    const std::string address = to_string(net.machine(m).address());
    if (after.compromised(m) && !before.compromised(m)) compromised.push_back(address);
    if (after.reachable(m) && !before.reachable(m)) reachable.push_back(address);
    json services = json::object();
    for (int j = 0; j < net.num_services(); ++j) {
      if (after.knowledge(m, j) == before.knowledge(m, j)) continue;
      services[net.service(j).id] =
          after.knowledge(m, j) == Knowledge::Present ? "present" : "absent";
    }
    if (!services.empty()) discovered[address] = std::move(services);
  }
  json delta = json::object();
  delta["compromised"] = std::move(compromised);
  delta["reachable"] = std::move(reachable);
  delta["discovered"] = std::move(discovered);
  return delta;
}

std::string node_id(const Address& a) {
  return "m" + std::to_string(a.subnet) + "_" + std::to_string(a.id);
}

std::string node_colour(const Network& net, const State& s, int machine) {
  if (s.compromised(machine)) return "black";
  if (net.machine(machine).sensitive()) return "pink";
  if (s.reachable(machine)) return "lightblue";
  return "red";
}

std::string render_dot(const Network& net, const State& final_state) {
  std::ostringstream out;
  out << "graph attack {\n";
  out << "  node [shape=circle, style=filled];\n";
  out << "  external [shape=box, fillcolor=white, label=\"internet\"];\n";
  for (int subnet = 1; subnet <= net.num_subnets(); ++subnet) {
    out << "  subgraph cluster_subnet" << subnet << " {\n";
    out << "    label=\"subnet " << subnet << "\";\n";
    for (int m : net.machines_in_subnet(subnet)) {
      const Machine& machine = net.machine(m);
      out << "    " << node_id(machine.address()) << " [label=\"("
          << machine.address().subnet << "," << machine.address().id
          << ")\", fillcolor=" << node_colour(net, final_state, m);
      if (final_state.compromised(m)) out << ", fontcolor=white";
      out << "];\n";
    }
    out << "  }\n";
  }
  for (int subnet = 1; subnet <= net.num_subnets(); ++subnet) {
    const auto members = net.machines_in_subnet(subnet);
    if (members.empty()) continue;
    if (net.subnets_connected(0, subnet))
      out << "  external -- " << node_id(net.machine(members[0]).address()) << ";\n";
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        out << "  " << node_id(net.machine(members[i]).address()) << " -- "
            << node_id(net.machine(members[j]).address()) << ";\n";
    for (int other = subnet + 1; other <= net.num_subnets(); ++other) {
      if (!net.subnets_connected(subnet, other)) continue;
      const auto peers = net.machines_in_subnet(other);
      if (peers.empty()) continue;
      out << "  " << node_id(net.machine(members[0]).address()) << " -- "
          << node_id(net.machine(peers[0]).address()) << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace

TraceOutput render_trace(const Network& net, const State& initial,
                         std::span<const EpisodeStep> steps) {
  TraceOutput output;
  std::ostringstream records;
  const State* previous = &initial;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const EpisodeStep& step = steps[t];
    json record;
    record["t"] = t;
    record["action_target"] = to_string(step.action.target);
    record["action_kind"] = step.action.kind == ActionKind::Scan ? "scan" : "exploit";
    if (step.action.kind == ActionKind::Exploit)
      record["service"] = net.service(step.action.service).id;
    else
      record["service"] = nullptr;
    record["reward"] = step.reward;
    record["done"] = all_sensitive_compromised(net, step.after);
    record["delta"] = state_delta(net, *previous, step.after);
    records << record.dump() << "\n";
    previous = &step.after;
  }
  output.records = records.str();
  output.dot = render_dot(net, *previous);
  return output;
}

}  // namespace attacksim
