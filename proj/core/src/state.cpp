#include "attacksim/state.hpp"

namespace attacksim {

State::State(int num_machines, int num_services)
    : num_machines_(num_machines),
      num_services_(num_services),
      compromised_(static_cast<std::size_t>(num_machines), 0),
      reachable_(static_cast<std::size_t>(num_machines), 0),
      knowledge_(static_cast<std::size_t>(num_machines) *
                     static_cast<std::size_t>(num_services),
                 0) {}

bool State::any_compromised() const {
  for (std::uint8_t c : compromised_)
    if (c) return true;
  return false;
}

std::string canonical_key(const State& s) {
  std::string key;
  key.reserve(static_cast<std::size_t>(s.num_machines()) *
              (2 + static_cast<std::size_t>(s.num_services())));
  for (int m = 0; m < s.num_machines(); ++m) {
    key.push_back(s.compromised(m) ? '1' : '0');
    key.push_back(s.reachable(m) ? '1' : '0');
    for (int j = 0; j < s.num_services(); ++j) {
      switch (s.knowledge(m, j)) {
        case Knowledge::Present: key.push_back('p'); break;
        case Knowledge::Absent: key.push_back('a'); break;
        case Knowledge::Unknown: key.push_back('u'); break;
      }
    }
  }
  return key;
}

}  // namespace attacksim
