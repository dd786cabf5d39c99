#pragma once

#include <filesystem>
#include <string>

#include "attacksim/network.hpp"

namespace attacksim {

// Parses a scenario document.  Structural problems (bad syntax, wrong
// node kinds) raise ParseError; entries that do not resolve (unknown
// service ids, bad addresses, missing firewall directions, values out
// of range) raise SemanticError whose message names the offending
// document key.  The loader checks document consistency only; whether
// the described network is actually winnable is validate()'s job.
Network load_scenario(const std::string& text);
Network load_scenario_file(const std::filesystem::path& path);

// Serializes a network back into the document format.  The output is
// deterministic and round trips: load_scenario(emit_scenario(net))
// compares equal to net.
std::string emit_scenario(const Network& net);

void write_scenario_file(const Network& net, const std::filesystem::path& path);

}  // namespace attacksim
