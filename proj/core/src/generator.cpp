#include "attacksim/generator.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace attacksim {

namespace {

void check_params(const GeneratorParams& p) {
  if (p.num_machines < 3)
    throw ParamError("generator: at least 3 machines required");
  if (p.num_services < 1)
    throw ParamError("generator: at least 1 service required");
  if (p.restrictiveness < 1)
    throw ParamError("generator: restrictiveness must be positive");
  if (p.alpha <= 0.0) throw ParamError("generator: alpha must be positive");
  if (p.exploit_cost < 0.0 || p.scan_cost < 0.0)
    throw ParamError("generator: costs must be non-negative");
  if (p.sensitive_value <= 0.0)
    throw ParamError("generator: sensitive value must be positive");
  if (p.prob_mode == ExploitProbMode::UserSupplied) {
    if (static_cast<int>(p.user_probs.size()) != p.num_services)
      throw ParamError("generator: need one probability per service");
    for (double prob : p.user_probs)
      if (prob < 0.0 || prob > 1.0)
        throw ParamError("generator: probabilities must lie in [0, 1]");
  }
  double weight_total = 0.0;
  for (double w : p.cvss_weights) {
    if (w < 0.0) throw ParamError("generator: negative difficulty weight");
    weight_total += w;
  }
  if (p.prob_mode == ExploitProbMode::CvssSampled && weight_total <= 0.0)
    throw ParamError("generator: difficulty weights must not all be zero");
}

std::vector<Service> make_services(const GeneratorParams& p, Rng& rng) {
  std::array<double, 3> levels{0.2, 0.5, 0.8};
  if (p.invert_cvss) std::reverse(levels.begin(), levels.end());
  double weight_total = 0.0;
  for (double w : p.cvss_weights) weight_total += w;

  std::vector<Service> services;
  for (int j = 0; j < p.num_services; ++j) {
    Service s;
    s.id = "srv_" + std::to_string(j);
    s.exploit_cost = p.exploit_cost;
    switch (p.prob_mode) {
      case ExploitProbMode::Deterministic:
        s.exploit_prob = 1.0;
        break;
      case ExploitProbMode::UserSupplied:
        s.exploit_prob = p.user_probs[static_cast<std::size_t>(j)];
        break;
      case ExploitProbMode::CvssSampled: {
        const double draw = uniform_double(rng) * weight_total;
        double cumulative = 0.0;
        s.exploit_prob = levels.back();
        for (std::size_t level = 0; level < levels.size(); ++level) {
          cumulative += p.cvss_weights[level];
          if (draw < cumulative) {
            s.exploit_prob = levels[level];
            break;
          }
        }
        break;
      }
    }
    services.push_back(std::move(s));
  }
  return services;
}

}  // namespace

std::vector<std::uint8_t> sample_machine_config(
    std::vector<std::vector<std::uint8_t>>& pool, int num_services, double alpha,
    Rng& rng) {
  if (!pool.empty()) {
    const double k = static_cast<double>(pool.size());
    if (uniform_double(rng) < k / (k + alpha)) {
      std::vector<std::uint8_t> config = pool[uniform_index(rng, pool.size())];
      pool.push_back(config);
      return config;
    }
  }
  std::vector<std::uint8_t> config(static_cast<std::size_t>(num_services), 0);
  bool any = false;
  while (!any) {
    for (int j = 0; j < num_services; ++j) {
      config[static_cast<std::size_t>(j)] = uniform_double(rng) < 0.5 ? 1 : 0;
      any = any || config[static_cast<std::size_t>(j)] != 0;
    }
  }
  pool.push_back(config);
  return config;
}

Network generate_network(const GeneratorParams& p) {
  check_params(p);
  Rng rng(p.seed);

  std::vector<Service> services = make_services(p, rng);

  // Subnet layout: 1 = demilitarized zone, 2 = sensitive, then the
  // user tree filled breadth first with up to five machines per node.
  const int user_machines = p.num_machines - 2;
  const int num_user = (user_machines + 4) / 5;
  std::vector<int> sizes{1, 1};
  for (int u = 0; u < num_user; ++u)
    sizes.push_back(std::min(5, user_machines - u * 5));
  const int n = static_cast<int>(sizes.size());

  const std::size_t side = static_cast<std::size_t>(n) + 1;
  std::vector<std::uint8_t> adj(side * side, 0);
  const auto link = [&](int a, int b) {
    adj[static_cast<std::size_t>(a) * side + static_cast<std::size_t>(b)] = 1;
    adj[static_cast<std::size_t>(b) * side + static_cast<std::size_t>(a)] = 1;
  };
  for (int s = 0; s <= n; ++s)
    adj[static_cast<std::size_t>(s) * side + static_cast<std::size_t>(s)] = 1;
  link(0, 1);           // the zone behind the perimeter firewall
  link(1, 2);
  link(1, 3);
  link(2, 3);
  for (int u = 1; u < num_user; ++u) link(3 + (u - 1) / 2, 3 + u);
  Topology topology(n, std::move(adj));

  std::vector<std::string> all_ids;
  for (const Service& s : services) all_ids.push_back(s.id);

  // Machine configurations in address order, correlated between
  // machines so realistic duplicated builds appear.  `present` tracks
  // which services exist per subnet, for anchoring firewall rules.
  std::vector<MachineSpec> machines;
  std::vector<std::vector<std::uint8_t>> pool;
  std::vector<std::set<int>> present(static_cast<std::size_t>(n) + 1);
  for (int subnet = 1; subnet <= n; ++subnet) {
    for (int id = 0; id < sizes[static_cast<std::size_t>(subnet) - 1]; ++id) {
      MachineSpec spec;
      spec.address = {subnet, id};
      const std::vector<std::uint8_t> config =
          sample_machine_config(pool, p.num_services, p.alpha, rng);
      for (int j = 0; j < p.num_services; ++j)
        if (config[static_cast<std::size_t>(j)]) {
          spec.services.push_back(all_ids[static_cast<std::size_t>(j)]);
          present[static_cast<std::size_t>(subnet)].insert(j);
        }
      machines.push_back(std::move(spec));
    }
  }
  const int last_leaf = n;  // breadth first fill ends at the deepest leaf
  for (MachineSpec& spec : machines)
    if (spec.address == Address{2, 0} || spec.address == Address{last_leaf, 0})
      spec.value = p.sensitive_value;

  FirewallRules rules;

  // A zone boundary firewall permits a random service set, capped by
  // the restrictiveness parameter and guaranteed to include one
  // service that is actually exploitable inside the destination, so
  // generated networks always remain winnable.
  const auto sample_rule = [&](int src, int dst) {
    const int cap = std::min(p.restrictiveness, p.num_services);
    std::set<int> chosen;
    if (dst != 0) {
      const auto& anchor_pool = present[static_cast<std::size_t>(dst)];
      std::vector<int> candidates(anchor_pool.begin(), anchor_pool.end());
      chosen.insert(candidates[uniform_index(rng, candidates.size())]);
      const int extra = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cap)));
      for (int i = 0; i < extra; ++i)
        chosen.insert(static_cast<int>(uniform_index(
            rng, static_cast<std::size_t>(p.num_services))));
    }
    std::vector<std::string> permitted;
    for (int j : chosen) permitted.push_back(all_ids[static_cast<std::size_t>(j)]);
    rules.emplace(std::make_pair(src, dst), std::move(permitted));
  };

  sample_rule(0, 1);
  sample_rule(1, 0);
  const std::vector<std::pair<int, int>> zone_edges{{1, 2}, {1, 3}, {2, 3}};
  for (const auto& [a, b] : zone_edges) {
    sample_rule(a, b);
    sample_rule(b, a);
  }
  for (int u = 1; u < num_user; ++u) {
    const int parent = 3 + (u - 1) / 2;
    const int child = 3 + u;
    rules.emplace(std::make_pair(parent, child), all_ids);
    rules.emplace(std::make_pair(child, parent), all_ids);
  }

  return Network(std::move(sizes), std::move(topology), std::move(services),
                 std::move(machines), std::move(rules));
}

}  // namespace attacksim
