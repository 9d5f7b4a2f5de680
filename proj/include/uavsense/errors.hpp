#pragma once

#include <stdexcept>
#include <string>

namespace uavsense {

/// Malformed input document (scenario, CSV map, trajectory file).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed document that violates a model invariant. `field()` is the
/// dotted path of the offending entry, e.g. `mixture` or `gbs[1].height_m`.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The planning instance has no feasible trajectory (endpoint below the SNR
/// threshold, disconnected endpoints, or distance budget too small).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration that cannot be honoured at run time, e.g. a sampler whose
/// rejection rate makes progress impossible or an oracle asked to enumerate
/// an instance above its size guard.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uavsense
