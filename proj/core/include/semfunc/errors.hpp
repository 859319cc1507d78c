#ifndef SEMFUNC_ERRORS_HPP
#define SEMFUNC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace semfunc {

// Base for everything thrown by this library. The CLI maps subclasses onto
// exit codes: user-correctable problems exit 1, internal failures exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed caller input: bad dimensions, unreadable files, bad flags.
class InputError : public Error {
 public:
  using Error::Error;
};

// A predicate, node, or link label that the model does not define.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Enumeration would exceed the configured joint-configuration budget.
class TractabilityError : public Error {
 public:
  using Error::Error;
};

// Conditioning event has probability zero, so the conditional is undefined.
class UndefinedConditionalError : public Error {
 public:
  using Error::Error;
};

// A distribution request whose normalizer is zero.
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

// Rank correlation over a list with zero rank variance.
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

// Structurally impossible request, e.g. a rescale with no feasible target.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Non-finite values where finite ones are required, or detected divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace semfunc

#endif
