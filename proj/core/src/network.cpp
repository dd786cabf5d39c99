#include "attacksim/network.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "attacksim/solvability.hpp"

namespace attacksim {

Topology::Topology(int num_subnets, std::vector<std::uint8_t> adjacency)
    : n_(num_subnets), adj_(std::move(adjacency)) {
  if (n_ < 0) throw Error("topology: negative subnet count");
  const std::size_t side = static_cast<std::size_t>(n_) + 1;
  if (adj_.size() != side * side)
    throw Error("topology: adjacency must have (subnets + 1)^2 entries");
}

bool Topology::connected(int a, int b) const {
  if (a < 0 || a > n_ || b < 0 || b > n_)
    throw InvalidSubnetError("subnet id out of range: " +
                             std::to_string(a < 0 || a > n_ ? a : b));
  const std::size_t side = static_cast<std::size_t>(n_) + 1;
  return adj_[static_cast<std::size_t>(a) * side + static_cast<std::size_t>(b)] != 0;
}

bool Topology::symmetric() const {
  const std::size_t side = static_cast<std::size_t>(n_) + 1;
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = i + 1; j < side; ++j)
      if (adj_[i * side + j] != adj_[j * side + i]) return false;
  return true;
}

bool Topology::diagonal_true() const {
  const std::size_t side = static_cast<std::size_t>(n_) + 1;
  for (std::size_t i = 0; i < side; ++i)
    if (adj_[i * side + i] == 0) return false;
  return true;
}

Network::Network(std::vector<int> subnet_sizes, Topology topology,
                 std::vector<Service> services, std::vector<MachineSpec> machines,
                 FirewallRules firewalls)
    : subnet_sizes_(std::move(subnet_sizes)),
      topology_(std::move(topology)),
      services_(std::move(services)),
      firewalls_(std::move(firewalls)) {
  for (int size : subnet_sizes_)
    if (size < 0) throw Error("network: negative subnet size");

  for (std::size_t j = 0; j < services_.size(); ++j)
    service_index_.emplace(services_[j].id, static_cast<int>(j));

  const int n = num_subnets();
  std::sort(machines.begin(), machines.end(),
            [](const MachineSpec& a, const MachineSpec& b) {
              return a.address < b.address;
            });
  machines_.reserve(machines.size());
  by_subnet_.assign(static_cast<std::size_t>(n) + 1, {});
  for (const MachineSpec& spec : machines) {
    if (spec.address.subnet < 1 || spec.address.subnet > n)
      throw Error("network: machine " + to_string(spec.address) +
                  " references a nonexistent subnet");
    Machine m;
    m.address_ = spec.address;
    m.value_ = spec.value;
    m.runs_.assign(services_.size(), 0);
    for (const std::string& id : spec.services) {
      auto it = service_index_.find(id);
      if (it == service_index_.end())
        throw Error("network: machine " + to_string(spec.address) +
                    " runs unknown service " + id);
      m.runs_[static_cast<std::size_t>(it->second)] = 1;
    }
    const int index = static_cast<int>(machines_.size());
    machine_index_.emplace(spec.address, index);
    by_subnet_[static_cast<std::size_t>(spec.address.subnet)].push_back(index);
    if (spec.value > 0) sensitive_.push_back(index);
    machines_.push_back(std::move(m));
  }

  const std::size_t side = static_cast<std::size_t>(n) + 1;
  rule_slot_.assign(side * side, -1);
  for (const auto& [pair, ids] : firewalls_) {
    const auto [src, dst] = pair;
    if (src < 0 || src > n || dst < 0 || dst > n) continue;
    std::vector<std::uint8_t> permit(services_.size(), 0);
    for (const std::string& id : ids) {
      auto it = service_index_.find(id);
      // Unknown ids are reported by validate(); skip them here.
      if (it != service_index_.end())
        permit[static_cast<std::size_t>(it->second)] = 1;
    }
    rule_slot_[static_cast<std::size_t>(src) * side + static_cast<std::size_t>(dst)] =
        static_cast<int>(permits_.size());
    permits_.push_back(std::move(permit));
  }
}

std::optional<int> Network::service_index(std::string_view id) const {
  auto it = service_index_.find(id);
  if (it == service_index_.end()) return std::nullopt;
  return it->second;
}

double Network::min_exploit_cost() const {
  double best = 0.0;
  bool first = true;
  for (const Service& s : services_) {
    if (first || s.exploit_cost < best) best = s.exploit_cost;
    first = false;
  }
  return best;
}

std::optional<int> Network::machine_index(const Address& a) const {
  auto it = machine_index_.find(a);
  if (it == machine_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const int> Network::machines_in_subnet(int subnet) const {
  if (subnet < 0 || subnet >= static_cast<int>(by_subnet_.size()))
    throw InvalidSubnetError("subnet id out of range: " + std::to_string(subnet));
  return by_subnet_[static_cast<std::size_t>(subnet)];
}

double Network::total_sensitive_value() const {
  double total = 0.0;
  for (int i : sensitive_) total += machines_[static_cast<std::size_t>(i)].value();
  return total;
}

bool Network::subnets_connected(int a, int b) const {
  return topology_.connected(a, b);
}

bool Network::traffic_permitted(int src, int dst, std::string_view service) const {
  auto sit = service_index_.find(service);
  if (sit == service_index_.end())
    throw Error("unknown service: " + std::string(service));
  if (src == dst) {
    if (src < 0 || src > num_subnets())
      throw InvalidSubnetError("subnet id out of range: " + std::to_string(src));
    return true;
  }
  if (!topology_.connected(src, dst))
    throw NoRouteError("no link between subnets " + std::to_string(src) +
                       " and " + std::to_string(dst));
  const std::size_t side = static_cast<std::size_t>(num_subnets()) + 1;
  const int slot = rule_slot_[static_cast<std::size_t>(src) * side +
                              static_cast<std::size_t>(dst)];
  if (slot < 0)
    throw Error("missing firewall rule for subnet pair (" + std::to_string(src) +
                "," + std::to_string(dst) + ")");
  return permits_[static_cast<std::size_t>(slot)][static_cast<std::size_t>(sit->second)] != 0;
}

bool Network::traffic_permitted_index(int src, int dst, int service_index) const {
  if (src == dst) return true;
  const std::size_t side = static_cast<std::size_t>(num_subnets()) + 1;
  const int slot = rule_slot_[static_cast<std::size_t>(src) * side +
                              static_cast<std::size_t>(dst)];
  if (slot < 0) return false;
  return permits_[static_cast<std::size_t>(slot)][static_cast<std::size_t>(service_index)] != 0;
}

bool Network::has_firewall_rule(int src, int dst) const {
  const std::size_t side = static_cast<std::size_t>(num_subnets()) + 1;
  return rule_slot_[static_cast<std::size_t>(src) * side +
                    static_cast<std::size_t>(dst)] >= 0;
}

bool Network::operator==(const Network& other) const {
  if (subnet_sizes_ != other.subnet_sizes_) return false;
  if (!(topology_ == other.topology_)) return false;
  if (services_ != other.services_) return false;
  if (machines_.size() != other.machines_.size()) return false;
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    const Machine& a = machines_[i];
    const Machine& b = other.machines_[i];
    if (a.address() != b.address() || a.value() != b.value() ||
        a.config() != b.config())
      return false;
  }
  return firewalls_ == other.firewalls_;
}

namespace {

void check_topology(const Network& net, std::vector<std::string>& out) {
  if (!net.topology().symmetric()) out.push_back("topology: adjacency is not symmetric");
  if (!net.topology().diagonal_true()) out.push_back("topology: diagonal must be all true");
  bool any_public = false;
  for (int s = 1; s <= net.num_subnets() && !any_public; ++s) {
    try {
      any_public = net.subnets_connected(0, s);
    } catch (const InvalidSubnetError&) {
    }
  }
  if (net.num_subnets() > 0 && !any_public)
    out.push_back("topology: no subnet is connected to the external network");
}

void check_machines(const Network& net, std::vector<std::string>& out) {
  int total = 0;
  for (std::size_t s = 0; s < net.subnet_sizes().size(); ++s) {
    if (net.subnet_sizes()[s] < 1)
      out.push_back("subnets: subnet " + std::to_string(s + 1) +
                    " must hold at least one machine");
    total += net.subnet_sizes()[s];
  }
  if (total != net.num_machines())
    out.push_back("machines: count " + std::to_string(net.num_machines()) +
                  " does not match subnet sizes total " + std::to_string(total));
  std::set<Address> seen;
  for (const Machine& m : net.machines()) {
    if (!seen.insert(m.address()).second)
      out.push_back("machines: duplicate address " + to_string(m.address()));
    const int size = m.address().subnet <= net.num_subnets()
                         ? net.subnet_sizes()[static_cast<std::size_t>(m.address().subnet) - 1]
                         : 0;
    if (m.address().id < 0 || m.address().id >= size)
      out.push_back("machines: address " + to_string(m.address()) +
                    " is outside its subnet's size");
  }
}

void check_services(const Network& net, std::vector<std::string>& out) {
  std::set<std::string> ids;
  for (const Service& s : net.services()) {
    if (!ids.insert(s.id).second)
      out.push_back("services: duplicate id " + s.id);
    if (s.exploit_prob < 0.0 || s.exploit_prob > 1.0)
      out.push_back("services: " + s.id + " probability outside [0, 1]");
    if (s.exploit_cost < 0.0)
      out.push_back("services: " + s.id + " has negative cost");
  }
}

void check_firewalls(const Network& net, std::vector<std::string>& out) {
  const int n = net.num_subnets();
  for (const auto& [pair, ids] : net.firewall_rules()) {
    const auto [src, dst] = pair;
    const std::string key =
        "firewalls[" + std::to_string(src) + "," + std::to_string(dst) + "]";
    if (src < 0 || src > n || dst < 0 || dst > n) {
      out.push_back(key + ": subnet id out of range");
      continue;
    }
    if (src == dst) {
      out.push_back(key + ": rules are only meaningful between distinct subnets");
      continue;
    }
    if (!net.subnets_connected(src, dst))
      out.push_back(key + ": no topology link between these subnets");
    for (const std::string& id : ids)
      if (!net.service_index(id))
        out.push_back(key + ": unknown service " + id);
  }
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      if (a == b || !net.subnets_connected(a, b)) continue;
      if (!net.has_firewall_rule(a, b))
        out.push_back("firewalls[" + std::to_string(a) + "," + std::to_string(b) +
                      "]: missing rule for linked subnet pair");
    }
  }
}

void check_solvable(const Network& net, std::vector<std::string>& out) {
  if (net.sensitive_machines().empty()) return;
  const SolvabilityReport report = solvability_oracle(net);
  for (const Address& a : report.unreachable_sensitive)
    out.push_back("sensitive machine " + to_string(a) +
                  " cannot be captured from the external network");
}

}  // namespace

std::vector<std::string> validate(const Network& net) {
  std::vector<std::string> out;
  check_topology(net, out);
  check_machines(net, out);
  check_services(net, out);
  check_firewalls(net, out);
  // Only bother with an attack path search on structurally sound input.
  if (out.empty()) check_solvable(net, out);
  return out;
}

}  // namespace attacksim
