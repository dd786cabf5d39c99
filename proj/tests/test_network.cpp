#include <algorithm>
#include <string>
#include <vector>

#include "attacksim/network.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace attacksim;
using attacksim::testing::example_network;
using attacksim::testing::toy_network;
using attacksim::testing::two_machine_network;

namespace {

bool mentions(const std::vector<std::string>& problems,
              const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) {
                       return p.find(needle) != std::string::npos;
                     });
}

}  // namespace

TEST_CASE("topology answers direct subnet connectivity") {
  Network net = example_network();
  CHECK(net.subnets_connected(1, 3));
  CHECK(net.subnets_connected(3, 1));
  CHECK_FALSE(net.subnets_connected(0, 4));
  CHECK_FALSE(net.subnets_connected(2, 5));
  CHECK(net.subnets_connected(0, 1));
  CHECK(net.subnets_connected(4, 4));
  CHECK(net.topology().symmetric());
  CHECK(net.topology().diagonal_true());
  CHECK_THROWS_AS((void)net.subnets_connected(0, 6), InvalidSubnetError);
  CHECK_THROWS_AS((void)net.subnets_connected(-1, 1), InvalidSubnetError);
}

TEST_CASE("topology rejects a malformed adjacency buffer") {
  CHECK_THROWS_AS(Topology(2, std::vector<std::uint8_t>(8, 1)), Error);
}

TEST_CASE("firewalls filter by service and direction") {
  Network net = example_network();
  CHECK(net.traffic_permitted(1, 3, "ssh"));
  CHECK_FALSE(net.traffic_permitted(1, 3, "ftp"));
  CHECK_FALSE(net.traffic_permitted(1, 3, "http"));
  CHECK(net.traffic_permitted(3, 1, "ftp"));
  CHECK(net.traffic_permitted(3, 1, "http"));
  CHECK_FALSE(net.traffic_permitted(3, 1, "ssh"));
}

TEST_CASE("traffic inside one subnet is never filtered") {
  Network net = example_network();
  for (const Service& s : net.services()) {
    CHECK(net.traffic_permitted(3, 3, s.id));
    CHECK(net.traffic_permitted(1, 1, s.id));
  }
}

TEST_CASE("an empty rule list denies every service") {
  Network net = example_network();
  for (const Service& s : net.services()) {
    CHECK_FALSE(net.traffic_permitted(1, 0, s.id));
  }
}

TEST_CASE("firewall queries reject bad routes and unknown services") {
  Network net = example_network();
  CHECK_THROWS_AS((void)net.traffic_permitted(2, 4, "ssh"), NoRouteError);
  CHECK_THROWS_AS((void)net.traffic_permitted(1, 3, "smtp"), Error);
}

TEST_CASE("indexed firewall lookup agrees with the checked one") {
  Network net = example_network();
  for (int src = 0; src <= net.num_subnets(); ++src) {
    for (int dst = 0; dst <= net.num_subnets(); ++dst) {
      if (src != dst && !net.subnets_connected(src, dst)) continue;
      for (int svc = 0; svc < net.num_services(); ++svc) {
        CHECK(net.traffic_permitted_index(src, dst, svc) ==
              net.traffic_permitted(src, dst, net.service(svc).id));
      }
    }
  }
}

TEST_CASE("machines are indexed in address order") {
  Network net = example_network();
  REQUIRE(net.num_machines() == 11);
  CHECK(net.machine(0).address() == Address{1, 0});
  CHECK(net.machine(1).address() == Address{1, 1});
  CHECK(net.machine(2).address() == Address{2, 0});
  CHECK(net.machine(10).address() == Address{5, 2});
  for (int i = 1; i < net.num_machines(); ++i) {
    CHECK(net.machine(i - 1).address() < net.machine(i).address());
  }
  CHECK(net.machine_index({2, 0}).value() == 2);
  CHECK_FALSE(net.machine_index({2, 1}).has_value());
  CHECK(net.machines_in_subnet(3).size() == 3);
  CHECK(net.machines_in_subnet(0).empty());
}

TEST_CASE("machine configs map onto service indices") {
  Network net = example_network();
  int ftp = net.service_index("ftp").value();
  int ssh = net.service_index("ssh").value();
  int http = net.service_index("http").value();
  CHECK(ftp == 0);
  CHECK(ssh == 1);
  CHECK(http == 2);
  const Machine& full = net.machine(net.machine_index({1, 1}).value());
  CHECK(full.runs(ftp));
  CHECK(full.runs(ssh));
  CHECK(full.runs(http));
  const Machine& lean = net.machine(net.machine_index({2, 0}).value());
  CHECK_FALSE(lean.runs(ftp));
  CHECK(lean.runs(ssh));
  CHECK_FALSE(lean.runs(http));
  CHECK_FALSE(lean.runs(-1));
  CHECK_FALSE(lean.runs(3));
}

TEST_CASE("sensitive machines and value totals") {
  Network net = example_network();
  CHECK(net.sensitive_machines() ==
        std::vector<int>{net.machine_index({2, 0}).value(),
                         net.machine_index({5, 0}).value()});
  CHECK(net.total_sensitive_value() == doctest::Approx(20.0));
  CHECK(net.machine(2).sensitive());
  CHECK_FALSE(net.machine(0).sensitive());
  CHECK(net.min_exploit_cost() == doctest::Approx(1.0));
}

TEST_CASE("hand built fixtures validate cleanly") {
  CHECK(validate(example_network()).empty());
  CHECK(validate(two_machine_network()).empty());
  CHECK(validate(toy_network()).empty());
  CHECK(validate(attacksim::testing::small_deep_network()).empty());
}

TEST_CASE("validate reports a missing firewall direction by pair") {
  std::vector<std::uint8_t> adj{1, 1, 0, 1, 1, 1, 0, 1, 1};
  FirewallRules fw{
      {{0, 1}, {"ssh"}},
      {{1, 0}, {}},
      {{1, 2}, {"ssh"}},
      // (2,1) deliberately absent.
  };
  Network net({1, 1}, Topology(2, adj), {{"ssh", 1.0, 1.0}},
              {{{1, 0}, 0.0, {"ssh"}}, {{2, 0}, 10.0, {"ssh"}}},
              std::move(fw));
  auto problems = validate(net);
  CHECK(mentions(problems, "firewalls[2,1]: missing rule"));
}

TEST_CASE("validate reports asymmetric adjacency") {
  std::vector<std::uint8_t> adj{1, 1, 0, 1, 1, 1, 0, 0, 1};
  Network net({1, 1}, Topology(2, adj), {{"ssh", 1.0, 1.0}},
              {{{1, 0}, 0.0, {"ssh"}}, {{2, 0}, 10.0, {"ssh"}}},
              {{{0, 1}, {"ssh"}},
               {{1, 0}, {}},
               {{1, 2}, {"ssh"}},
               {{2, 1}, {"ssh"}}});
  CHECK(mentions(validate(net), "not symmetric"));
}

TEST_CASE("validate reports machine count drift and bad probabilities") {
  std::vector<std::uint8_t> adj{1, 1, 1, 1};
  Network net({2}, Topology(1, adj), {{"ssh", 1.5, 1.0}},
              {{{1, 0}, 10.0, {"ssh"}}},
              {{{0, 1}, {"ssh"}}, {{1, 0}, {}}});
  auto problems = validate(net);
  CHECK(mentions(problems, "count 1 does not match subnet sizes total 2"));
  CHECK(mentions(problems, "ssh probability outside [0, 1]"));
}

TEST_CASE("validate reports unknown service ids inside rules") {
  std::vector<std::uint8_t> adj{1, 1, 1, 1};
  Network net({1}, Topology(1, adj), {{"ssh", 1.0, 1.0}},
              {{{1, 0}, 10.0, {"ssh"}}},
              {{{0, 1}, {"smtp"}}, {{1, 0}, {}}});
  CHECK(mentions(validate(net), "firewalls[0,1]: unknown service smtp"));
}

TEST_CASE("validate reports sensitive machines no attack can reach") {
  std::vector<std::uint8_t> adj{1, 1, 0, 1, 1, 1, 0, 1, 1};
  // The inner firewall drops everything, so (2,0) can never fall.
  Network net({1, 1}, Topology(2, adj), {{"ssh", 1.0, 1.0}},
              {{{1, 0}, 0.0, {"ssh"}}, {{2, 0}, 10.0, {"ssh"}}},
              {{{0, 1}, {"ssh"}},
               {{1, 0}, {}},
               {{1, 2}, {}},
               {{2, 1}, {}}});
  CHECK(mentions(validate(net), "sensitive machine 2,0 cannot be captured"));
}

TEST_CASE("validate reports a network with no public subnet") {
  std::vector<std::uint8_t> adj{1, 0, 0, 1};
  Network net({1}, Topology(1, adj), {{"ssh", 1.0, 1.0}},
              {{{1, 0}, 10.0, {"ssh"}}}, {});
  CHECK(mentions(validate(net),
                 "no subnet is connected to the external network"));
}

TEST_CASE("network equality covers every component") {
  CHECK(example_network() == example_network());
  CHECK_FALSE(example_network() == two_machine_network());
  Network a = two_machine_network();
  Network b = two_machine_network(0.5);
  CHECK_FALSE(a == b);
}
