#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlh {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments: bad dimensions, spacing, shapes or option values.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Operator applied to a cochain of unsupported degree.
class DegreeError : public Error {
public:
  using Error::Error;
};

/// Metric that is not symmetric positive-definite at some vertex.
class MetricError : public Error {
public:
  MetricError(const std::string& what, std::size_t vertex)
      : Error(what), vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

private:
  std::size_t vertex_;
};

/// Q outside the domain of a density model (e.g. Q >= Q_max for polytropic gas).
class DomainError : public Error {
public:
  DomainError(const std::string& what, double q, double q_max)
      : Error(what), q_(q), q_max_(q_max) {}
  double q() const noexcept { return q_; }
  double q_max() const noexcept { return q_max_; }

private:
  double q_;
  double q_max_;
};

/// A solver step would cross the sonic cap; carries the offending top cell.
class SonicLimitError : public Error {
public:
  SonicLimitError(const std::string& what, std::size_t cell, double q)
      : Error(what), cell_(cell), q_(q) {}
  std::size_t cell() const noexcept { return cell_; }
  double q() const noexcept { return q_; }

private:
  std::size_t cell_;
  double q_;
};

/// Iterative solver exhausted its iteration budget.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Plaquette holonomy too close to the cut locus of the group logarithm.
class LogBranchError : public Error {
public:
  LogBranchError(const std::string& what, std::size_t plaquette)
      : Error(what), plaquette_(plaquette) {}
  std::size_t plaquette() const noexcept { return plaquette_; }

private:
  std::size_t plaquette_;
};

/// Discrete ball not contained in the complex.
class BallError : public Error {
public:
  BallError(const std::string& what, double max_radius)
      : Error(what), max_radius_(max_radius) {}
  double max_radius() const noexcept { return max_radius_; }

private:
  double max_radius_;
};

/// Configuration problems; line numbers refer to the config file.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace nlh
