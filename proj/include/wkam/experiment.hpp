#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wkam/hamiltonian.hpp"
#include "wkam/metric_graph.hpp"

namespace wkam {

namespace fs = std::filesystem;

inline constexpr const char* kConfigSchema = "wkam.experiment/1";

/// Scalar field description resolved against a graph at run time.
struct ProfileConfig {
  std::string kind = "constant";  ///< constant | cos | sin | dist-to | values | csv
  double value = 0.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  double offset = 0.0;
  std::optional<double> floor;
  VertexId vertex = 0;
  double scale = 1.0;
  std::vector<double> values;
  fs::path path;
};

inline ProfileConfig constant_profile(double value) {
  ProfileConfig p;
  p.value = value;
  return p;
}

struct SpaceConfig {
  std::string kind = "interval";  ///< interval | circle | sierpinski | edge_list
  std::size_t segments = 200;
  double length = 1.0;
  int level = 3;
  fs::path path;
  std::optional<fs::path> coords;
};

struct HamiltonianConfig {
  Family family = Family::affine;
  ProfileConfig a = constant_profile(1.0);
  ProfileConfig potential;
  double k = 2.0;
  double p_cap = kDefaultPCap;
  std::vector<double> p_grid;
  std::vector<std::vector<double>> samples;
};

struct ExperimentConfig {
  std::string schema = kConfigSchema;
  SpaceConfig space;
  HamiltonianConfig hamiltonian;
  ProfileConfig initial = constant_profile(0.0);
  double initial_shift = 0.0;
  double t_end = 1.0;
  std::size_t store_every = 1;
  double cfl_factor = 0.9;
  double tol_aubry = 1e-9;
  std::optional<double> tol_cmp;
  std::optional<double> tol_convergence;
  fs::path output = "out";
  std::uint64_t seed = 0;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  bool ok() const noexcept { return config.has_value(); }
};

/// Applies `path.to.field=value` overrides; values parse as JSON, falling back to strings.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

/// Validates a parsed document, reporting every problem at once. Relative paths
/// resolve against `base_dir`.
ValidationResult validate_config(const nlohmann::json& doc, const fs::path& base_dir);
ValidationResult validate_config(const fs::path& path, const std::vector<std::string>& overrides = {});

nlohmann::json to_json(const ExperimentConfig& config);

MetricGraph build_space(const SpaceConfig& space);
NodeFunction build_profile(const MetricGraph& g, const ProfileConfig& profile);
Hamiltonian build_hamiltonian(const MetricGraph& g, const HamiltonianConfig& cfg);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int suite_failure = 1;
inline constexpr int config = 2;
inline constexpr int numerical = 3;
inline constexpr int invariant = 4;
}  // namespace exit_code

struct InvariantCheck {
  std::string name;
  bool ok = true;
  double value = 0.0;
  double limit = 0.0;
};

struct RunResult {
  int exit_code = exit_code::ok;
  std::string message;
  fs::path output;
  nlohmann::json summary;
  std::vector<InvariantCheck> invariants;
};

/// S(., y) files are written for at most this many Aubry sources.
inline constexpr std::size_t kMaxPotentialFiles = 8;

/// Builds the space and Hamiltonian, evolves u0, and writes the output bundle to config.output.
RunResult run_experiment(const ExperimentConfig& config);

struct SuiteResult {
  int exit_code = exit_code::ok;
  nlohmann::json report;
};

/// Runs every config in turn, isolating failures, and writes suite.json to `out_dir`.
SuiteResult run_suite(const std::vector<fs::path>& configs, const fs::path& out_dir,
                      const std::vector<std::string>& overrides = {});

}  // namespace wkam
