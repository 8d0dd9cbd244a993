#pragma once

#include <stdexcept>
#include <string>

namespace hvp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise unusable field data.
class CorruptState : public Error {
 public:
  using Error::Error;
};

/// Operator assembly requested outside the admissible coefficient range.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Linear solve failed to reach the requested residual.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Configuration file missing keys or violating constraints.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad argument to a pointwise routine (domain of a formula).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Base of the monitor-triggered aborts (exit status 2 in the CLI).
class MonitorAbort : public Error {
 public:
  using Error::Error;
};

/// The flow-map gradient left the region where its inverse is controlled.
class InvertibilityLost : public MonitorAbort {
 public:
  InvertibilityLost(const std::string& what, int node, double time)
      : MonitorAbort(what), node_(node), time_(time) {}
  int node() const { return node_; }
  double time() const { return time_; }

 private:
  int node_;
  double time_;
};

/// The state left the admissible set h > kappa, 0 < a < 1.
class BlowupSignal : public MonitorAbort {
 public:
  BlowupSignal(const std::string& what, double time) : MonitorAbort(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Fixed-point iteration did not reach tolerance within the iteration budget.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace hvp
