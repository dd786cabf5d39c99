#pragma once

#include <stdexcept>

namespace attacksim {

// Base type for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A subnet id outside the network's range.
struct InvalidSubnetError : Error {
  using Error::Error;
};

// A subnet pair with no connecting link.
struct NoRouteError : Error {
  using Error::Error;
};

// An action that does not belong to the network's action space.
struct InvalidActionError : Error {
  using Error::Error;
};

// A scenario document that is not syntactically well formed.
struct ParseError : Error {
  using Error::Error;
};

// A scenario document entry that does not resolve: unknown service,
// bad address, missing firewall direction and the like.  The message
// names the offending document key.
struct SemanticError : Error {
  using Error::Error;
};

// Invalid generator or experiment parameters.
struct ParamError : Error {
  using Error::Error;
};

}  // namespace attacksim
