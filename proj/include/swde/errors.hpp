#pragma once

#include <stdexcept>
#include <string>

namespace swde {

//! Process exit codes used by the command-line tool.
enum class ExitCode : int
{
  success = 0,
  usage = 1,
  data = 2,
  numeric = 3
};

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::usage; }
};

//! Invalid or unsupported configuration (e.g. an unknown wavelet order).
class ConfigError : public Error
{
public:
  using Error::Error;
};

//! A function argument violates its precondition.
class ArgumentError : public Error
{
public:
  using Error::Error;
};

//! Operation requested on a coefficient set in the wrong representation.
class RepresentationError : public Error
{
public:
  using Error::Error;
};

//! Malformed or inconsistent input data.
class DataError : public Error
{
public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

//! The sample cannot support the requested estimate (n too small, k >= n, ...).
class EstimationError : public DataError
{
public:
  using DataError::DataError;
};

//! Numerically degenerate situation: zero mass, zero-range axis, ...
class DegenerateError : public Error
{
public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numeric; }
};

} // namespace swde
