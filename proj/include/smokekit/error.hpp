#ifndef SMOKEKIT_ERROR_HPP
#define SMOKEKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace smokekit {

/// Violated precondition on an argument (bad channel count, mismatched sizes, out-of-range parameter).
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read, written or decoded.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Eval JSON is missing a required field or carries a wrong type.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (JSON syntax, number, field spec).
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string &msg) {
  if (!cond) {
    throw ContractError(msg);
  }
}

} // namespace detail
} // namespace smokekit

#endif // SMOKEKIT_ERROR_HPP
