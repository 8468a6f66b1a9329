#include "wkam/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wkam {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::affine: return "affine";
    case Family::power: return "power";
    case Family::tabulated: return "tabulated";
  }
  return "unknown";
}

namespace {

void require_finite_field(const std::vector<double>& values, std::size_t n, const char* what) {
  if (values.size() != n) {
    throw Error(Errc::invalid_argument, std::string(what) + " has " + std::to_string(values.size()) +
                                            " entries for " + std::to_string(n) + " vertices");
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!std::isfinite(values[v])) {
      throw Error(Errc::invalid_argument, std::string(what) + " is not finite at vertex " + std::to_string(v), v);
    }
  }
}

void require_p_cap(double p_cap) {
  if (!(p_cap > 0.0) || !std::isfinite(p_cap)) throw Error(Errc::invalid_argument, "p_cap must be positive");
}

bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

Hamiltonian Hamiltonian::affine(const MetricGraph& g, std::vector<double> a, std::vector<double> f, double p_cap) {
  require_finite_field(a, g.vertex_count(), "affine coefficient a");
  require_finite_field(f, g.vertex_count(), "potential f");
  require_p_cap(p_cap);
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (!(a[v] > 0.0)) {
      throw Error(Errc::invalid_argument, "affine coefficient must be positive at vertex " + std::to_string(v), v);
    }
  }
  Hamiltonian H;
  H.family_ = Family::affine;
  H.graph_id_ = g.id();
  H.coeff_ = std::move(a);
  H.potential_ = std::move(f);
  H.p_cap_ = p_cap;
  return H;
}

Hamiltonian Hamiltonian::affine(const MetricGraph& g, double a, std::vector<double> f, double p_cap) {
  return affine(g, std::vector<double>(g.vertex_count(), a), std::move(f), p_cap);
}

Hamiltonian Hamiltonian::power(const MetricGraph& g, double k, std::vector<double> f, double p_cap) {
  if (!(k >= 1.0) || !std::isfinite(k)) throw Error(Errc::invalid_argument, "power exponent must be >= 1");
  require_finite_field(f, g.vertex_count(), "potential f");
  require_p_cap(p_cap);
  Hamiltonian H;
  H.family_ = Family::power;
  H.graph_id_ = g.id();
  H.exponent_ = k;
  H.potential_ = std::move(f);
  H.p_cap_ = p_cap;
  return H;
}

Hamiltonian Hamiltonian::tabulated(const MetricGraph& g, std::vector<double> p_grid,
                                   std::vector<std::vector<double>> samples) {
  const std::size_t n = g.vertex_count();
  if (p_grid.size() < 2) throw Error(Errc::invalid_argument, "tabulated p-grid needs at least two points");
  if (p_grid.front() != 0.0) throw Error(Errc::invalid_argument, "tabulated p-grid must start at 0");
  for (std::size_t i = 1; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > p_grid[i - 1]) || !std::isfinite(p_grid[i])) {
      throw Error(Errc::invalid_argument, "tabulated p-grid must be strictly increasing and finite");
    }
  }
  if (samples.size() != 1 && samples.size() != n) {
    throw Error(Errc::invalid_argument, "tabulated samples need one row per vertex or a single shared row");
  }
  Hamiltonian H;
  H.family_ = Family::tabulated;
  H.graph_id_ = g.id();
  H.p_cap_ = p_grid.back();
  H.samples_.reserve(n * p_grid.size());
  for (std::size_t v = 0; v < n; ++v) {
    const auto& row = samples.size() == 1 ? samples.front() : samples[v];
    if (row.size() != p_grid.size()) {
      throw Error(Errc::invalid_argument, "tabulated row for vertex " + std::to_string(v) + " has " +
                                              std::to_string(row.size()) + " samples, grid has " +
                                              std::to_string(p_grid.size()), v);
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::isfinite(row[i])) {
        throw Error(Errc::invalid_argument, "tabulated sample is not finite at vertex " + std::to_string(v), v);
      }
      if (i > 0 && row[i] < row[i - 1]) H.monotone_ = false;
    }
    H.samples_.insert(H.samples_.end(), row.begin(), row.end());
    H.potential_.push_back(row.front());
  }
  H.p_grid_ = std::move(p_grid);
  return H;
}

double Hamiltonian::interpolate(VertexId x, double q) const {
  if (q > p_cap_) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "|p| = " << q << " lies beyond the tabulated range [0, " << p_cap_ << "]";
    throw Error(Errc::domain, msg.str(), x);
  }
  const std::size_t m = p_grid_.size();
  const double* row = samples_.data() + x * m;
  const auto it = std::upper_bound(p_grid_.begin(), p_grid_.end(), q);
  if (it == p_grid_.end()) return row[m - 1];
  const std::size_t hi = static_cast<std::size_t>(it - p_grid_.begin());
  const std::size_t lo = hi - 1;
  const double w = (q - p_grid_[lo]) / (p_grid_[hi] - p_grid_[lo]);
  return row[lo] + w * (row[hi] - row[lo]);
}

double Hamiltonian::eval(VertexId x, double p) const {
  if (x >= vertex_count()) throw Error(Errc::invalid_argument, "unknown vertex " + std::to_string(x), x);
  return (*this)(x, p);
}

std::vector<double> Hamiltonian::at_zero() const {
  std::vector<double> out(vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = (*this)(v, 0.0);
  return out;
}

bool Hamiltonian::x_independent() const noexcept {
  switch (family_) {
    case Family::affine: return all_equal(coeff_) && all_equal(potential_);
    case Family::power: return all_equal(potential_);
    case Family::tabulated: {
      const std::size_t m = p_grid_.size();
      for (std::size_t v = 1; v < vertex_count(); ++v) {
        if (!std::equal(samples_.begin(), samples_.begin() + m, samples_.begin() + v * m)) return false;
      }
      return true;
    }
  }
  return false;
}

double Hamiltonian::p_lipschitz(double slope_bound) const {
  switch (family_) {
    case Family::affine: return *std::max_element(coeff_.begin(), coeff_.end());
    case Family::power:
      if (exponent_ == 1.0) return 1.0;
      return exponent_ * std::pow(slope_bound, exponent_ - 1.0);
    case Family::tabulated: {
      double lip = 0.0;
      const std::size_t m = p_grid_.size();
      for (std::size_t v = 0; v < vertex_count(); ++v) {
        const double* row = samples_.data() + v * m;
        for (std::size_t i = 1; i < m; ++i) {
          if (p_grid_[i - 1] > slope_bound) break;
          lip = std::max(lip, std::abs(row[i] - row[i - 1]) / (p_grid_[i] - p_grid_[i - 1]));
        }
      }
      return lip;
    }
  }
  return 0.0;
}

void require_on_graph(const MetricGraph& g, const Hamiltonian& H) {
  if (H.graph_id() != g.id() || H.vertex_count() != g.vertex_count()) {
    throw Error(Errc::invalid_argument, "hamiltonian is defined on a different graph");
  }
}

namespace {

constexpr std::size_t kMaxWitnesses = 16;

void add_witness(std::vector<Witness>& list, Witness w) {
  if (list.size() < kMaxWitnesses) list.push_back(w);
}

std::vector<double> audit_grid(const Hamiltonian& H, std::size_t p_samples) {
  std::vector<double> grid{0.0};
  const double p_hi = H.p_cap();
  const double p_lo = p_hi * 1e-9;
  const double ratio = std::pow(p_hi / p_lo, 1.0 / static_cast<double>(p_samples - 1));
  for (std::size_t i = 0; i < p_samples; ++i) {
    grid.push_back(i + 1 == p_samples ? p_hi : p_lo * std::pow(ratio, static_cast<double>(i)));
  }
  if (H.family() == Family::tabulated) grid.insert(grid.end(), H.p_grid().begin(), H.p_grid().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double min_over_vertices(const Hamiltonian& H, double p) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < H.vertex_count(); ++v) m = std::min(m, H(v, p));
  return m;
}

}  // namespace

AssumptionReport check_assumptions(const MetricGraph& g, const Hamiltonian& H, std::size_t p_samples,
                                   const NodeFunction* u0) {
  require_on_graph(g, H);
  if (p_samples < 3) throw Error(Errc::invalid_argument, "check_assumptions needs at least 3 p samples");
  AssumptionReport report;
  const std::vector<double> grid = audit_grid(H, p_samples);
  const std::size_t n = H.vertex_count();

  const auto zero = H.at_zero();
  for (std::size_t v = 0; v < n; ++v) {
    if (!std::isfinite(zero[v])) {
      report.bounded_at_zero_ok = false;
      add_witness(report.bounded_at_zero_witnesses, {v, 0.0, std::numeric_limits<double>::infinity()});
    }
  }
  report.c = *std::max_element(zero.begin(), zero.end());

  std::vector<double> values(grid.size());
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = H(v, grid[i]);
    bool convex_witnessed = false;
    bool monotone_witnessed = false;
    auto midpoint = [&](std::size_t i, std::size_t j) {
      if (convex_witnessed) return;
      const double pm = 0.5 * (grid[i] + grid[j]);
      const double avg = 0.5 * (values[i] + values[j]);
      const double excess = H(v, pm) - avg;
      if (excess > 1e-12 * (1.0 + std::abs(avg))) {
        report.convexity_ok = false;
        add_witness(report.convexity_witnesses, {v, pm, excess});
        convex_witnessed = true;
      }
    };
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      midpoint(i, i + 1);
      if (i + 2 < grid.size()) midpoint(i, i + 2);
      midpoint(0, i + 1);
      const double drop = values[i] - values[i + 1];
      if (!monotone_witnessed && drop > 1e-12 * (1.0 + std::abs(values[i]))) {
        report.monotone_ok = false;
        add_witness(report.monotone_witnesses, {v, grid[i + 1], drop});
        monotone_witnessed = true;
      }
    }
    const double at_cap = values.back();
    if (at_cap < report.c) {
      report.coercivity_ok = false;
      add_witness(report.coercivity_witnesses, {v, grid.back(), report.c - at_cap});
    }
  }

  if (report.coercivity_ok) {
    // g(p) = min_x H(x, p) is nondecreasing when every curve is; scan then bisect.
    std::size_t first = 0;
    while (first < grid.size() && min_over_vertices(H, grid[first]) < report.c) ++first;
    if (first == 0) {
      report.L = 0.0;
    } else {
      double lo = grid[first - 1];
      double hi = grid[first];
      for (int iter = 0; iter < 2000; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi)) break;
        (min_over_vertices(H, mid) >= report.c ? hi : lo) = mid;
      }
      report.L = hi;
    }
  }

  if (u0 != nullptr) {
    const double lip = lipschitz_constant(g, *u0);
    double k = 0.0;
    for (std::size_t v = 0; v < n; ++v) k = std::max(k, std::abs(H(v, lip)));
    report.K = k;
  }
  return report;
}

double sigma_c(const Hamiltonian& H, VertexId x, double c, double tol_c) {
  if (x >= H.vertex_count()) throw Error(Errc::invalid_argument, "unknown vertex " + std::to_string(x), x);
  const double h0 = H(x, 0.0);
  if (c < h0 - tol_c) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "level c = " << c << " lies below H(x, 0) = " << h0 << " at vertex " << x;
    throw Error(Errc::infeasible_level, msg.str(), x);
  }
  if (h0 >= c) return 0.0;
  if (!H.monotone()) {
    throw Error(Errc::domain, "sigma_c requires p -> H(x, p) nondecreasing; the tabulated curve is not", x);
  }
  const double cap = H.p_cap();
  double lo = 0.0;
  double hi = std::min(1.0, cap);
  while (H(x, hi) <= c) {
    if (hi >= cap) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "H(x, p) <= c = " << c << " up to p_cap = " << cap << " at vertex " << x;
      throw Error(Errc::coercivity_violation, msg.str(), x);
    }
    lo = hi;
    hi = std::min(2.0 * hi, cap);
  }
  // invariant: H(lo) <= c < H(hi); stop once they are adjacent doubles
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    (H(x, mid) <= c ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace wkam
