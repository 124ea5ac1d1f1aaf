#ifndef HERO_ERRORS_HPP
#define HERO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hero {

struct DegenerateRotation : std::runtime_error {
  explicit DegenerateRotation(const std::string& what) : std::runtime_error(what) {}
};

struct IllegalTransition : std::runtime_error {
  explicit IllegalTransition(const std::string& what) : std::runtime_error(what) {}
};

struct EpochMismatch : std::runtime_error {
  explicit EpochMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidCovariance : std::runtime_error {
  explicit InvalidCovariance(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientStreams : std::runtime_error {
  explicit InsufficientStreams(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidDt : std::runtime_error {
  explicit InvalidDt(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

struct MissingAnchor : std::runtime_error {
  explicit MissingAnchor(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfRange : std::runtime_error {
  explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

// Carries the JSON field path of the offending entry, e.g. "streams[2].rate".
struct ConfigError : std::runtime_error {
  ConfigError(std::string field_path, const std::string& what)
      : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
  std::string field;
};

}  // namespace hero

#endif  // HERO_ERRORS_HPP
