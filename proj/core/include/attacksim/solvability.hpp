#pragma once

#include <string>
#include <vector>

#include "attacksim/network.hpp"

namespace attacksim {

// One exploit on a capturing attack path.
struct WitnessStep {
  int source_subnet = 0;  // 0 = launched from the external network
  Address target;
  std::string service;
};

struct SolvabilityReport {
  bool solvable = false;
  // Exploit order that captures every sensitive machine; empty when
  // the network is unsolvable.
  std::vector<WitnessStep> witness;
  // Minimum number of successful exploits any attack needs.  Exact
  // for instances small enough to search exhaustively; for larger
  // ones this is a lower bound, flagged by exact = false, so the
  // derived reward ceiling stays an upper bound either way.
  int min_exploits = 0;
  bool exact = true;
  std::vector<Address> unreachable_sensitive;
};

// Decides whether every sensitive machine can be captured starting
// from the external network, produces a witness exploit order, and
// computes the minimum exploit count.
SolvabilityReport solvability_oracle(const Network& net);

// Reward ceiling for one episode: total sensitive value minus the
// cheapest possible exploit bill.
double theoretical_max_return(const Network& net, const SolvabilityReport& report);

}  // namespace attacksim
