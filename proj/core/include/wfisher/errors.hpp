#pragma once

#include <stdexcept>
#include <string>

namespace wfisher {

/// Thrown when an iterative routine fails to converge or a computation
/// leaves the representable range. Domain/precondition violations throw
/// std::domain_error or std::invalid_argument instead.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wfisher
