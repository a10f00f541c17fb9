// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsf
{

// Base for every error raised by the library. Callers that only care about
// "something went wrong in the numerics" catch this.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error
{
public:
  ParseError(const std::string &message, std::size_t position)
    : Error(message + " at position " + std::to_string(position)), position_(position)
  {
  }

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

class EvalError : public Error
{
public:
  using Error::Error;
};

class PreconditionError : public Error
{
public:
  using Error::Error;
};

// Raised at the poles of the Cayley map and its inverse.
class PoleError : public Error
{
public:
  using Error::Error;
};

class SingularMatrixError : public Error
{
public:
  using Error::Error;
};

// Iterative solver gave up; the best estimate reached so far is kept.
class ConvergenceError : public Error
{
public:
  ConvergenceError(const std::string &message, double best_estimate)
    : Error(message), best_estimate_(best_estimate)
  {
  }

  double best_estimate() const noexcept { return best_estimate_; }

private:
  double best_estimate_;
};

class ConfigError : public Error
{
public:
  ConfigError(const std::string &field, const std::string &message)
    : Error("config field '" + field + "': " + message), field_(field)
  {
  }

  const std::string &field() const noexcept { return field_; }

private:
  std::string field_;
};

} // namespace hsf
