#pragma once

#include <stdexcept>
#include <string>

namespace twistbench {

/// Malformed or out-of-domain user input (unknown vertex, bad JSON, ...).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition of an operation was violated by the caller.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace twistbench
