#pragma once

#include <stdexcept>
#include <string>

namespace gds {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration or argument (maps to CLI exit code 2).
class ConfigError : public Error
{
 public:
  using Error::Error;
};

/// A spatial frequency outside the open band (-sqrt(pi), 0) U (0, sqrt(pi)).
class OutOfSupportError : public Error
{
 public:
  using Error::Error;
};

/// Two containers that must share a grid do not.
class GridMismatchError : public Error
{
 public:
  using Error::Error;
};

class StabilityError : public Error
{
 public:
  using Error::Error;
};

}  // namespace gds
