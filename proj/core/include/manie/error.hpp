#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace manie {

/// Invalid argument to a generator, simulator, solver or injector.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input text (edge lists, CSV, config documents).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (e.g. negative losses).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Linear system could not be factorized.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric is undefined for the given input (e.g. AUC without positives).
class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure inside an iterative procedure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Non-fatal diagnostics (convergence, degenerate designs) go through here.
/// The default handler prints to stderr. Thread-safe.
void warn(std::string_view message);

/// Installs a handler and returns the previous one. Pass nullptr to silence.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace manie
