#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "attacksim/network.hpp"
#include "attacksim/rng.hpp"

namespace attacksim {

enum class ExploitProbMode {
  Deterministic,  // every exploit succeeds
  CvssSampled,    // success probability sampled per service
  UserSupplied,   // explicit probability per service
};

struct GeneratorParams {
  int num_machines = 16;  // at least 3
  int num_services = 5;   // at least 1
  std::uint64_t seed = 0;
  ExploitProbMode prob_mode = ExploitProbMode::CvssSampled;
  // Per service success probability, UserSupplied mode only.
  std::vector<double> user_probs;
  double exploit_cost = 1.0;
  double scan_cost = 1.0;
  double sensitive_value = 10.0;
  // Upper limit on how many services a zone boundary firewall permits.
  int restrictiveness = 5;
  // Concentration of the configuration sampler; smaller means more
  // machines share identical configurations.
  double alpha = 1.0;
  // Sampling weights for the three exploit difficulty levels, easy to
  // hard.  The matching probabilities are 0.2, 0.5, 0.8, or the
  // reverse with invert_cvss set.
  std::array<double, 3> cvss_weights{1.0, 1.0, 1.0};
  bool invert_cvss = false;
};

// Draws one machine configuration.  With probability k / (k + alpha),
// where k configurations were drawn before, an earlier draw is reused
// (picked uniformly from all previous draws, so popular configurations
// stay proportionally likely); otherwise a fresh configuration is
// drawn with each service independently present at 0.5, rejecting the
// all-absent draw.  Either way the result is appended to the pool.
std::vector<std::uint8_t> sample_machine_config(
    std::vector<std::vector<std::uint8_t>>& pool, int num_services, double alpha,
    Rng& rng);

// Builds a layered network: one machine in the demilitarized zone
// reachable from outside, one machine in a sensitive subnet, and the
// rest spread over a breadth first binary tree of user subnets with
// at most five machines each.  The zone subnets are fully
// interconnected, zone boundary firewalls permit a small service set
// that always leaves every subnet exploitable from its neighbours,
// and firewalls inside the user tree permit everything.  Two machines
// carry value: the sensitive subnet's machine and the first machine
// of the deepest, last filled user leaf.  The same parameters always
// produce the same network.
Network generate_network(const GeneratorParams& params);

}  // namespace attacksim
