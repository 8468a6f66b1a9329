#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wkam {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class Errc {
  invalid_argument,
  resource_limit,
  domain,
  infeasible_level,
  coercivity_violation,
  numerical_blowup,
  unsupported_oracle,
  range,
  io,
  invariant_violation,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> vertex = std::nullopt)
      : std::runtime_error(what), code_(code), vertex_(vertex) {}

  Errc code() const noexcept { return code_; }

  /// Vertex that triggered the failure, when one is known.
  std::optional<std::size_t> vertex() const noexcept { return vertex_; }

 private:
  Errc code_;
  std::optional<std::size_t> vertex_;
};

/// Raised when a run-time invariant check fails; name() identifies the invariant.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string name, const std::string& detail)
      : Error(Errc::invariant_violation, name + ": " + detail), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace wkam
