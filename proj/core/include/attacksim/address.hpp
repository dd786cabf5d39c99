#pragma once

#include <compare>
#include <string>

namespace attacksim {

// Location of a machine: subnet number plus position within that
// subnet.  Subnet 0 is the external network and never holds machines,
// so machine addresses always have subnet >= 1.
struct Address {
  int subnet = 0;
  int id = 0;

  auto operator<=>(const Address&) const = default;
};

inline std::string to_string(const Address& a) {
  return std::to_string(a.subnet) + "," + std::to_string(a.id);
}

}  // namespace attacksim
