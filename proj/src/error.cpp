#include "wkam/error.hpp"

namespace wkam {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::resource_limit: return "resource-limit";
    case Errc::domain: return "domain";
    case Errc::infeasible_level: return "infeasible-level";
    case Errc::coercivity_violation: return "coercivity-violation";
    case Errc::numerical_blowup: return "numerical-blowup";
    case Errc::unsupported_oracle: return "unsupported-oracle";
    case Errc::range: return "range";
    case Errc::io: return "io";
    case Errc::invariant_violation: return "invariant-violation";
  }
  return "unknown";
}

}  // namespace wkam
