#pragma once

#include <stdexcept>
#include <string>

namespace cpapr {

// Malformed or unreadable input data (tensor files, machine specs, configs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments that violate an operation's contract (shapes, ranges, options).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cpapr
