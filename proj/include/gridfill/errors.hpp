#pragma once

#include <stdexcept>
#include <string>

namespace gridfill {

// Base class for all errors raised by the library. The CLI maps the
// concrete type to a machine-readable error category.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data (malformed files, inconsistent series, out-of-range values).
class InputError : public Error {
public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

// Invalid or inconsistent configuration (non-divisible intervals,
// repository/config mismatches, empty repositories).
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Numerical failure (factorization breakdown, non-convergence).
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Reraises library errors with a context prefix, preserving the concrete
// error type.
template <typename Fn>
auto with_error_context(const std::string& prefix, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(prefix + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + ": " + e.what());
  }
}

}  // namespace gridfill
