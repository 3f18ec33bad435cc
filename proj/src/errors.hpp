#pragma once

#include <stdexcept>
#include <string>

namespace ccplan {

/// Precondition violated by caller-supplied data.
class InvalidArgument : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Input is valid in principle but numerically unusable (e.g. near-singular).
class NumericError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration document. `where` names the field
/// path or line:column of the problem.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where))
    {
    }
    const std::string& where() const noexcept { return where_; }

  private:
    std::string where_;
};

}  // namespace ccplan
