#pragma once

#include <stdexcept>
#include <string>

namespace csbp
{
//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Precondition on an argument violated (negative lambda, bad grid, ...).
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! Integration or simulation produced an unusable number.
class NumericalError : public Error
{
  public:
    using Error::Error;
};

//! A configured resource cap (jump count, step count) was exceeded.
class ResourceError : public Error
{
  public:
    using Error::Error;
};

//! A Monte Carlo procedure could not produce an estimate.
class StatisticalError : public Error
{
  public:
    using Error::Error;
};

//! Invalid configuration; the message starts with the offending field path.
class ConfigError : public Error
{
  public:
    ConfigError(std::string field, std::string const& what)
        : Error(field + ": " + what), field_(std::move(field))
    {
    }
    std::string const& field() const noexcept { return field_; }

  private:
    std::string field_;
};

}  // namespace csbp
