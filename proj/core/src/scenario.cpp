#include "attacksim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace attacksim {

namespace {

const char* const kKnownKeys[] = {
    "subnets",          "topology",
    "sensitive_machines", "num_services",
    "services",         "service_exploits",
    "machine_configurations", "firewalls",
};

[[noreturn]] void semantic(const std::string& message) { throw SemanticError(message); }

int as_int(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) semantic(key + ": expected an integer");
  try {
    return node.as<int>();
  } catch (const YAML::Exception&) {
    semantic(key + ": expected an integer");
  }
}

double as_double(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) semantic(key + ": expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    semantic(key + ": expected a number");
  }
}

std::string as_string(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) semantic(key + ": expected a string");
  return node.as<std::string>();
}

// Parses "a,b" into two non-negative integers.
bool parse_pair(const std::string& text, int* a, int* b) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) return false;
  const auto parse = [](std::string_view part, int* out) {
    if (part.empty()) return false;
    const char* begin = part.data();
    const char* end = begin + part.size();
    const auto result = std::from_chars(begin, end, *out);
    return result.ec == std::errc() && result.ptr == end && *out >= 0;
  };
  return parse(std::string_view(text).substr(0, comma), a) &&
         parse(std::string_view(text).substr(comma + 1), b);
}

std::vector<int> load_subnets(const YAML::Node& root) {
  const YAML::Node node = root["subnets"];
  if (!node) semantic("subnets: missing");
  if (!node.IsSequence() || node.size() == 0)
    semantic("subnets: expected a non-empty sequence of machine counts");
  std::vector<int> sizes;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const int size = as_int(node[i], "subnets");
    if (size < 1) semantic("subnets: subnet " + std::to_string(i + 1) +
                           " must hold at least one machine");
    sizes.push_back(size);
  }
  return sizes;
}

Topology load_topology(const YAML::Node& root, int num_subnets) {
  const YAML::Node node = root["topology"];
  if (!node) semantic("topology: missing");
  const std::size_t side = static_cast<std::size_t>(num_subnets) + 1;
  if (!node.IsSequence() || node.size() != side)
    semantic("topology: expected " + std::to_string(side) +
             " rows covering the external network and every subnet");
  std::vector<std::uint8_t> adj(side * side, 0);
  for (std::size_t r = 0; r < side; ++r) {
    const YAML::Node row = node[r];
    if (!row.IsSequence() || row.size() != side)
      semantic("topology: row " + std::to_string(r) + " must have " +
               std::to_string(side) + " entries");
    for (std::size_t c = 0; c < side; ++c) {
      const int v = as_int(row[c], "topology");
      if (v != 0 && v != 1)
        semantic("topology: entries must be 0 or 1");
      adj[r * side + c] = static_cast<std::uint8_t>(v);
    }
  }
  Topology topology(num_subnets, std::move(adj));
  if (!topology.symmetric()) semantic("topology: adjacency must be symmetric");
  if (!topology.diagonal_true()) semantic("topology: diagonal entries must be 1");
  return topology;
}

std::vector<std::string> load_service_ids(const YAML::Node& root) {
  const YAML::Node names = root["services"];
  const YAML::Node count = root["num_services"];
  if (names && count)
    semantic("services: give either services or num_services, not both");
  std::vector<std::string> ids;
  if (names) {
    if (!names.IsSequence() || names.size() == 0)
      semantic("services: expected a non-empty sequence of ids");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::string id = as_string(names[i], "services");
      if (id.empty()) semantic("services: ids must be non-empty");
      if (!seen.insert(id).second) semantic("services: duplicate id " + id);
      ids.push_back(std::move(id));
    }
    return ids;
  }
  if (!count) semantic("services: missing (give services or num_services)");
  const int n = as_int(count, "num_services");
  if (n < 1) semantic("num_services: must be at least 1");
  for (int i = 0; i < n; ++i) ids.push_back("srv_" + std::to_string(i));
  return ids;
}

std::vector<Service> load_services(const YAML::Node& root,
                                   const std::vector<std::string>& ids) {
  const YAML::Node node = root["service_exploits"];
  if (!node) semantic("service_exploits: missing");
  if (!node.IsMap()) semantic("service_exploits: expected a mapping");
  std::set<std::string> known(ids.begin(), ids.end());
  std::set<std::string> seen;
  for (const auto& entry : node) {
    const std::string id = as_string(entry.first, "service_exploits");
    if (!known.count(id)) semantic("service_exploits[" + id + "]: unknown service");
    seen.insert(id);
  }
  std::vector<Service> services;
  for (const std::string& id : ids) {
    const std::string key = "service_exploits[" + id + "]";
    if (!seen.count(id)) semantic(key + ": missing exploit entry");
    const YAML::Node entry = node[id];
    if (!entry.IsSequence() || entry.size() != 2)
      semantic(key + ": expected [probability, cost]");
    Service s;
    s.id = id;
    s.exploit_prob = as_double(entry[0], key);
    s.exploit_cost = as_double(entry[1], key);
    if (s.exploit_prob < 0.0 || s.exploit_prob > 1.0)
      semantic(key + ": probability outside [0, 1]");
    if (s.exploit_cost < 0.0) semantic(key + ": negative cost");
    services.push_back(std::move(s));
  }
  return services;
}

struct Sensitive {
  Address address;
  double value = 0.0;
};

std::vector<Sensitive> load_sensitive(const YAML::Node& root,
                                      const std::vector<int>& sizes) {
  const YAML::Node node = root["sensitive_machines"];
  if (!node) semantic("sensitive_machines: missing");
  if (!node.IsSequence() || node.size() == 0)
    semantic("sensitive_machines: expected a non-empty sequence");
  std::vector<Sensitive> out;
  std::set<Address> seen;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const YAML::Node entry = node[i];
    if (!entry.IsSequence() || entry.size() != 3)
      semantic("sensitive_machines: entries are [subnet, id, value]");
    Sensitive s;
    s.address.subnet = as_int(entry[0], "sensitive_machines");
    s.address.id = as_int(entry[1], "sensitive_machines");
    s.value = as_double(entry[2], "sensitive_machines");
    const std::string key = "sensitive_machines[" + to_string(s.address) + "]";
    if (s.address.subnet < 1 || s.address.subnet > static_cast<int>(sizes.size()) ||
        s.address.id < 0 ||
        s.address.id >= sizes[static_cast<std::size_t>(s.address.subnet) - 1])
      semantic(key + ": no such machine");
    if (s.value <= 0.0) semantic(key + ": value must be positive");
    if (!seen.insert(s.address).second) semantic(key + ": listed twice");
    out.push_back(s);
  }
  return out;
}

std::vector<MachineSpec> load_machines(const YAML::Node& root,
                                       const std::vector<int>& sizes,
                                       const std::vector<Sensitive>& sensitive,
                                       const std::set<std::string>& services) {
  const YAML::Node node = root["machine_configurations"];
  if (!node) semantic("machine_configurations: missing");
  if (!node.IsMap()) semantic("machine_configurations: expected a mapping");

  std::map<Address, std::vector<std::string>> configs;
  for (const auto& entry : node) {
    const std::string raw = as_string(entry.first, "machine_configurations");
    const std::string key = "machine_configurations[" + raw + "]";
    Address address;
    if (!parse_pair(raw, &address.subnet, &address.id))
      semantic(key + ": keys are \"subnet,id\" addresses");
    if (address.subnet < 1 || address.subnet > static_cast<int>(sizes.size()) ||
        address.id >= sizes[static_cast<std::size_t>(address.subnet) - 1])
      semantic(key + ": no such machine");
    if (configs.count(address)) semantic(key + ": listed twice");
    if (!entry.second.IsSequence())
      semantic(key + ": expected a sequence of service ids");
    std::vector<std::string> running;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < entry.second.size(); ++i) {
      std::string id = as_string(entry.second[i], key);
      if (!services.count(id)) semantic(key + ": unknown service " + id);
      if (!seen.insert(id).second) semantic(key + ": service " + id + " listed twice");
      running.push_back(std::move(id));
    }
    configs.emplace(address, std::move(running));
  }

  std::vector<MachineSpec> machines;
  for (int subnet = 1; subnet <= static_cast<int>(sizes.size()); ++subnet) {
    for (int id = 0; id < sizes[static_cast<std::size_t>(subnet) - 1]; ++id) {
      const Address address{subnet, id};
      auto it = configs.find(address);
      if (it == configs.end())
        semantic("machine_configurations[" + to_string(address) + "]: missing");
      MachineSpec spec;
      spec.address = address;
      spec.services = std::move(it->second);
      machines.push_back(std::move(spec));
    }
  }
  for (const Sensitive& s : sensitive)
    for (MachineSpec& spec : machines)
      if (spec.address == s.address) spec.value = s.value;
  return machines;
}

FirewallRules load_firewalls(const YAML::Node& root, const Topology& topology,
                             const std::set<std::string>& services) {
  const YAML::Node node = root["firewalls"];
  if (!node) semantic("firewalls: missing");
  if (!node.IsMap()) semantic("firewalls: expected a mapping");
  const int n = topology.num_subnets();

  FirewallRules rules;
  for (const auto& entry : node) {
    const std::string raw = as_string(entry.first, "firewalls");
    const std::string key = "firewalls[" + raw + "]";
    int src = 0, dst = 0;
    if (!parse_pair(raw, &src, &dst))
      semantic(key + ": keys are \"src,dst\" subnet pairs");
    if (src > n || dst > n) semantic(key + ": subnet id out of range");
    if (src == dst) semantic(key + ": source and destination must differ");
    if (!topology.connected(src, dst))
      semantic(key + ": no topology link between these subnets");
    if (rules.count({src, dst})) semantic(key + ": listed twice");
    if (!entry.second.IsSequence())
      semantic(key + ": expected a sequence of permitted service ids");
    std::vector<std::string> permitted;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < entry.second.size(); ++i) {
      std::string id = as_string(entry.second[i], key);
      if (!services.count(id)) semantic(key + ": unknown service " + id);
      if (!seen.insert(id).second) semantic(key + ": service " + id + " listed twice");
      permitted.push_back(std::move(id));
    }
    rules.emplace(std::make_pair(src, dst), std::move(permitted));
  }

  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      if (a == b || !topology.connected(a, b)) continue;
      if (!rules.count({a, b}))
        semantic("firewalls[" + std::to_string(a) + "," + std::to_string(b) +
                 "]: missing rule for linked subnet pair");
    }
  return rules;
}

// Shortest representation that parses back to the same value.
std::string format_number(double v) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

bool plain_safe(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      return false;
  return std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_';
}

std::string quote(const std::string& s) {
  if (plain_safe(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string id_list(const std::vector<std::string>& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += quote(ids[i]);
  }
  out += "]";
  return out;
}

}  // namespace

Network load_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!root.IsMap()) throw ParseError("scenario: top level must be a mapping");

  for (const auto& entry : root) {
    const std::string key = as_string(entry.first, "scenario");
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) semantic(key + ": unknown key");
  }

  const std::vector<int> sizes = load_subnets(root);
  const Topology topology = load_topology(root, static_cast<int>(sizes.size()));
  const std::vector<std::string> ids = load_service_ids(root);
  std::vector<Service> services = load_services(root, ids);
  const std::set<std::string> known_services(ids.begin(), ids.end());
  const std::vector<Sensitive> sensitive = load_sensitive(root, sizes);
  std::vector<MachineSpec> machines =
      load_machines(root, sizes, sensitive, known_services);
  FirewallRules firewalls = load_firewalls(root, topology, known_services);

  return Network(sizes, topology, std::move(services), std::move(machines),
                 std::move(firewalls));
}

Network load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

std::string emit_scenario(const Network& net) {
  std::ostringstream out;

  out << "subnets: [";
  for (std::size_t i = 0; i < net.subnet_sizes().size(); ++i) {
    if (i) out << ", ";
    out << net.subnet_sizes()[i];
  }
  out << "]\n";

  out << "topology:\n";
  for (int r = 0; r <= net.num_subnets(); ++r) {
    out << "- [";
    for (int c = 0; c <= net.num_subnets(); ++c) {
      if (c) out << ", ";
      out << (net.subnets_connected(r, c) ? 1 : 0);
    }
    out << "]\n";
  }

  out << "sensitive_machines:\n";
  for (int m : net.sensitive_machines()) {
    const Machine& machine = net.machine(m);
    out << "- [" << machine.address().subnet << ", " << machine.address().id
        << ", " << format_number(machine.value()) << "]\n";
  }

  std::vector<std::string> ids;
  for (const Service& s : net.services()) ids.push_back(s.id);
  out << "services: " << id_list(ids) << "\n";

  out << "service_exploits:\n";
  for (const Service& s : net.services())
    out << "  " << quote(s.id) << ": [" << format_number(s.exploit_prob) << ", "
        << format_number(s.exploit_cost) << "]\n";

  out << "machine_configurations:\n";
  for (const Machine& m : net.machines()) {
    std::vector<std::string> running;
    for (int j = 0; j < net.num_services(); ++j)
      if (m.runs(j)) running.push_back(net.service(j).id);
    out << "  \"" << to_string(m.address()) << "\": " << id_list(running) << "\n";
  }

  out << "firewalls:\n";
  for (const auto& [pair, permitted] : net.firewall_rules())
    out << "  \"" << pair.first << "," << pair.second
        << "\": " << id_list(permitted) << "\n";

  return out.str();
}

void write_scenario_file(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write scenario file " + path.string());
  out << emit_scenario(net);
}

}  // namespace attacksim
