#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace attacksim {

// What the attacker knows about one service on one machine.  The
// numeric values double as the encoding used by the deep agent's
// state vector.
enum class Knowledge : std::int8_t {
  Unknown = 0,
  Present = 1,
  Absent = -1,
};

// Attacker view of the network: which machines are compromised, which
// are reachable, and the per service knowledge gathered from scans and
// successful exploits.  Within an episode flags only ever go from
// unset to set.
class State {
 public:
  State() = default;
  State(int num_machines, int num_services);

  int num_machines() const { return num_machines_; }
  int num_services() const { return num_services_; }

  bool compromised(int machine) const {
    return compromised_[static_cast<std::size_t>(machine)] != 0;
  }
  bool reachable(int machine) const {
    return reachable_[static_cast<std::size_t>(machine)] != 0;
  }
  Knowledge knowledge(int machine, int service) const {
    return static_cast<Knowledge>(
        knowledge_[static_cast<std::size_t>(machine) *
                       static_cast<std::size_t>(num_services_) +
                   static_cast<std::size_t>(service)]);
  }

  void set_compromised(int machine) {
    compromised_[static_cast<std::size_t>(machine)] = 1;
  }
  void set_reachable(int machine) {
    reachable_[static_cast<std::size_t>(machine)] = 1;
  }
  void set_knowledge(int machine, int service, Knowledge k) {
    knowledge_[static_cast<std::size_t>(machine) *
                   static_cast<std::size_t>(num_services_) +
               static_cast<std::size_t>(service)] = static_cast<std::int8_t>(k);
  }

  bool any_compromised() const;

  bool operator==(const State&) const = default;

 private:
  int num_machines_ = 0;
  int num_services_ = 0;
  std::vector<std::uint8_t> compromised_;
  std::vector<std::uint8_t> reachable_;
  std::vector<std::int8_t> knowledge_;  // machine major, one entry per service
};

// Stable printable key: per machine one compromised flag ('0'/'1'),
// one reachable flag and one knowledge letter per service ('u', 'p',
// 'a').  Distinct states yield distinct keys, the length is always
// machines * (2 + services), and nothing depends on process layout,
// so keys can index tables that persist across runs.
std::string canonical_key(const State& s);

}  // namespace attacksim
