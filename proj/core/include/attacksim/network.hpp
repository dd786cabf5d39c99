#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attacksim/address.hpp"
#include "attacksim/errors.hpp"

namespace attacksim {

// An exploitable service.  Every machine either runs a service or it
// does not; attempting the matching exploit costs exploit_cost and
// succeeds with probability exploit_prob.
struct Service {
  std::string id;
  double exploit_prob = 1.0;
  double exploit_cost = 1.0;

  bool operator==(const Service&) const = default;
};

// Machine description as supplied by a loader or generator: where the
// machine sits, its value (> 0 marks it sensitive) and the ids of the
// services it runs.
struct MachineSpec {
  Address address;
  double value = 0.0;
  std::vector<std::string> services;
};

// Subnet adjacency including row and column 0 for the external
// network.  A well formed topology is symmetric with a true diagonal;
// those properties are reported by validate() rather than enforced
// here so that broken inputs stay representable.
class Topology {
 public:
  Topology() = default;
  // adjacency holds (num_subnets + 1)^2 entries in row major order.
  Topology(int num_subnets, std::vector<std::uint8_t> adjacency);

  // Number of real subnets; valid ids for queries are 0..num_subnets().
  int num_subnets() const { return n_; }

  // True when traffic can flow directly between the two subnets.
  // Throws InvalidSubnetError when either id is out of range.
  bool connected(int a, int b) const;

  bool symmetric() const;
  bool diagonal_true() const;

  bool operator==(const Topology&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> adj_;
};

// Permitted service ids per directed subnet pair.  Every link between
// two distinct subnets needs an entry for both directions; an absent
// direction is a configuration error, not deny-all.
using FirewallRules = std::map<std::pair<int, int>, std::vector<std::string>>;

class Network;

class Machine {
 public:
  const Address& address() const { return address_; }
  double value() const { return value_; }
  bool sensitive() const { return value_ > 0; }
  bool runs(int service_index) const {
    return service_index >= 0 &&
           service_index < static_cast<int>(runs_.size()) &&
           runs_[static_cast<std::size_t>(service_index)] != 0;
  }
  // One flag per service, in network service order.
  const std::vector<std::uint8_t>& config() const { return runs_; }

 private:
  friend class Network;
  Address address_;
  double value_ = 0.0;
  std::vector<std::uint8_t> runs_;
};

// Immutable model of the target network: subnets, topology, services,
// machines and firewalls.  Machines are kept sorted by address, which
// fixes machine indices and through them the action space and state
// encodings.
class Network {
 public:
  Network(std::vector<int> subnet_sizes, Topology topology,
          std::vector<Service> services, std::vector<MachineSpec> machines,
          FirewallRules firewalls);

  // Real subnets only; the external network is subnet 0 on top.
  int num_subnets() const { return static_cast<int>(subnet_sizes_.size()); }
  int num_machines() const { return static_cast<int>(machines_.size()); }
  int num_services() const { return static_cast<int>(services_.size()); }

  const std::vector<int>& subnet_sizes() const { return subnet_sizes_; }
  const Topology& topology() const { return topology_; }

  const std::vector<Service>& services() const { return services_; }
  const Service& service(int index) const {
    return services_[static_cast<std::size_t>(index)];
  }
  std::optional<int> service_index(std::string_view id) const;
  double min_exploit_cost() const;

  const std::vector<Machine>& machines() const { return machines_; }
  const Machine& machine(int index) const {
    return machines_[static_cast<std::size_t>(index)];
  }
  std::optional<int> machine_index(const Address& a) const;
  std::span<const int> machines_in_subnet(int subnet) const;

  // Indices of machines with value > 0, ascending.
  const std::vector<int>& sensitive_machines() const { return sensitive_; }
  double total_sensitive_value() const;

  const FirewallRules& firewall_rules() const { return firewalls_; }

  // Same as topology().connected.
  bool subnets_connected(int a, int b) const;

  // True when the firewall lets `service` flow from subnet src to
  // subnet dst.  Traffic inside a single subnet is never filtered.
  // Throws NoRouteError when the subnets are not linked, Error when
  // the service id is unknown or the rule for the pair is missing.
  bool traffic_permitted(int src, int dst, std::string_view service) const;

  // Unchecked fast path used by the simulator: returns false when the
  // pair has no rule instead of throwing.  src == dst is always true.
  bool traffic_permitted_index(int src, int dst, int service_index) const;
  bool has_firewall_rule(int src, int dst) const;

  bool operator==(const Network& other) const;

 private:
  std::vector<int> subnet_sizes_;
  Topology topology_;
  std::vector<Service> services_;
  std::vector<Machine> machines_;
  FirewallRules firewalls_;

  std::map<std::string, int, std::less<>> service_index_;
  std::map<Address, int> machine_index_;
  std::vector<std::vector<int>> by_subnet_;  // indexed by subnet id
  std::vector<int> sensitive_;
  // Dense per directed pair: -1 = no rule, else index into permits_.
  std::vector<int> rule_slot_;
  std::vector<std::vector<std::uint8_t>> permits_;  // one flag per service
};

// Checks every structural rule and returns one message per violation.
// An empty result means the network is well formed and every sensitive
// machine can actually be captured from the external network.
std::vector<std::string> validate(const Network& net);

}  // namespace attacksim
