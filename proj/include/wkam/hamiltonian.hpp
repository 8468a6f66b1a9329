#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wkam/metric_graph.hpp"

namespace wkam {

enum class Family { affine, power, tabulated };

std::string_view to_string(Family f) noexcept;

inline constexpr double kDefaultPCap = 1e6;
inline constexpr double kTolRoot = 1e-10;
inline constexpr double kTolC = 1e-9;

/// Hamiltonian H(x, p), always evaluated at |p| so it is even in p.
///
///   affine:    H = a(x) |p| + f(x),  a > 0
///   power:     H = |p|^k + f(x),     k >= 1
///   tabulated: piecewise-linear curve per vertex on a shared p-grid starting at 0
///
/// The solvers only rely on p -> H(x, p) being nondecreasing on [0, inf).
/// Tabulated curves built through tabulated() may violate that so the
/// assumption audit can report it; monotone() says whether they do.
class Hamiltonian {
 public:
  static Hamiltonian affine(const MetricGraph& g, std::vector<double> a, std::vector<double> f,
                            double p_cap = kDefaultPCap);
  static Hamiltonian affine(const MetricGraph& g, double a, std::vector<double> f, double p_cap = kDefaultPCap);
  static Hamiltonian power(const MetricGraph& g, double k, std::vector<double> f, double p_cap = kDefaultPCap);
  /// `samples` holds one row per vertex, or a single row shared by all vertices.
  static Hamiltonian tabulated(const MetricGraph& g, std::vector<double> p_grid,
                               std::vector<std::vector<double>> samples);

  Family family() const noexcept { return family_; }
  std::uint64_t graph_id() const noexcept { return graph_id_; }
  std::size_t vertex_count() const noexcept { return potential_.size(); }
  double p_cap() const noexcept { return p_cap_; }
  bool monotone() const noexcept { return monotone_; }

  /// Checked evaluation: validates the vertex, throws a domain error when a
  /// tabulated curve would be extrapolated.
  double eval(VertexId x, double p) const;

  /// Evaluation without the vertex check, for the kernels.
  double operator()(VertexId x, double p) const {
    const double q = p < 0.0 ? -p : p;
    switch (family_) {
      case Family::affine: return coeff_[x] * q + potential_[x];
      case Family::power: return (exponent_ == 1.0 ? q : (exponent_ == 2.0 ? q * q : std::pow(q, exponent_))) +
                                 potential_[x];
      case Family::tabulated: return interpolate(x, q);
    }
    return 0.0;
  }

  /// H(x, 0) for every vertex.
  std::vector<double> at_zero() const;

  /// For affine/power: f. For tabulated: the p = 0 column.
  std::span<const double> potential() const noexcept { return potential_; }
  std::span<const double> coefficients() const noexcept { return coeff_; }
  double exponent() const noexcept { return exponent_; }
  std::span<const double> p_grid() const noexcept { return p_grid_; }
  std::span<const double> samples(VertexId x) const noexcept {
    return {samples_.data() + x * p_grid_.size(), p_grid_.size()};
  }

  /// True when H(x, p) does not depend on x.
  bool x_independent() const noexcept;

  /// Upper bound on sup_{0 <= p <= slope_bound} |dH/dp| over all vertices.
  double p_lipschitz(double slope_bound) const;

 private:
  Hamiltonian() = default;
  double interpolate(VertexId x, double q) const;

  Family family_ = Family::affine;
  std::uint64_t graph_id_ = 0;
  std::vector<double> coeff_;
  std::vector<double> potential_;
  double exponent_ = 1.0;
  std::vector<double> p_grid_;
  std::vector<double> samples_;
  double p_cap_ = kDefaultPCap;
  bool monotone_ = true;
};

void require_on_graph(const MetricGraph& g, const Hamiltonian& H);

struct Witness {
  VertexId vertex;
  double p;
  double excess;  ///< amount by which the checked inequality failed
};

/// Sampled audit of the standing assumptions (continuity is implicit on a
/// finite graph). Each witness list is empty exactly when its flag is true.
struct AssumptionReport {
  bool convexity_ok = true;
  bool coercivity_ok = true;
  bool bounded_at_zero_ok = true;
  bool monotone_ok = true;
  std::vector<Witness> convexity_witnesses;
  std::vector<Witness> coercivity_witnesses;
  std::vector<Witness> bounded_at_zero_witnesses;
  std::vector<Witness> monotone_witnesses;
  double c = 0.0;
  /// Smallest p with min_x H(x, p) >= c; absent when coercivity fails.
  std::optional<double> L;
  /// max_x |H(x, Lip[u0])|, present when initial data was supplied.
  std::optional<double> K;
};

/// Samples convexity and monotonicity on a geometric p-grid up to p_cap.
AssumptionReport check_assumptions(const MetricGraph& g, const Hamiltonian& H, std::size_t p_samples,
                                   const NodeFunction* u0 = nullptr);

/// max{p >= 0 : H(x, p) <= c} by bracket doubling from p = 1 and bisection.
double sigma_c(const Hamiltonian& H, VertexId x, double c, double tol_c = kTolC);

}  // namespace wkam
