#include "wkam/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "wkam/asymptotics.hpp"
#include "wkam/evolution.hpp"
#include "wkam/io.hpp"
#include "wkam/weak_kam.hpp"

namespace wkam {

using nlohmann::json;

// -- overrides --------------------------------------------------------------

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(Errc::invalid_argument, "override '" + item + "' must look like path.to.field=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw Error(Errc::invalid_argument, "override '" + item + "' has an empty path segment");
      if (!node->is_object()) {
        throw Error(Errc::invalid_argument, "override '" + item + "' descends into a non-object field");
      }
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
      start = dot + 1;
    }
  }
}

// -- validation -------------------------------------------------------------

namespace {

class Checker {
 public:
  explicit Checker(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& where, const std::string& what) { errors_.push_back(where + ": " + what); }

  void allow_only(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) error(where + "." + it.key(), "unknown field");
    }
  }

  std::optional<double> number(const json& obj, const std::string& where, const char* key,
                               std::optional<double> fallback, bool required = false) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!obj.contains(key) || obj[key].is_null()) {
      if (required) error(path, "required field is missing");
      return fallback;
    }
    const json& v = obj[key];
    if (!v.is_number()) {
      error(path, "expected a number, got " + v.dump());
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      error(path, "must be finite");
      return fallback;
    }
    return d;
  }

  std::optional<std::int64_t> integer(const json& obj, const std::string& where, const char* key,
                                      std::optional<std::int64_t> fallback, bool required = false) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!obj.contains(key) || obj[key].is_null()) {
      if (required) error(path, "required field is missing");
      return fallback;
    }
    const json& v = obj[key];
    if (!v.is_number_integer()) {
      error(path, "expected an integer, got " + v.dump());
      return fallback;
    }
    return v.get<std::int64_t>();
  }

  std::optional<std::string> string(const json& obj, const std::string& where, const char* key,
                                    std::optional<std::string> fallback, bool required = false) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!obj.contains(key) || obj[key].is_null()) {
      if (required) error(path, "required field is missing");
      return fallback;
    }
    if (!obj[key].is_string()) {
      error(path, "expected a string, got " + obj[key].dump());
      return fallback;
    }
    return obj[key].get<std::string>();
  }

  std::vector<double> number_array(const json& v, const std::string& where) {
    std::vector<double> out;
    if (!v.is_array()) {
      error(where, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        error(where + "[" + std::to_string(i) + "]", "expected a finite number");
      } else {
        out.push_back(v[i].get<double>());
      }
    }
    return out;
  }

  fs::path existing_file(const json& obj, const std::string& where, const char* key, const fs::path& base,
                         bool required = true) {
    const auto s = string(obj, where, key, std::nullopt, required);
    if (!s) return {};
    fs::path p(*s);
    if (p.is_relative()) p = base / p;
    if (!fs::is_regular_file(p)) error(where + "." + key, "file not found: " + p.string());
    return p;
  }

 private:
  std::vector<std::string>& errors_;
};

constexpr const char* kProfileKinds = "constant, zero, cos, sin, dist-to, values, csv";
constexpr const char* kFamilies = "affine, power, tabulated";
constexpr const char* kSpaces = "interval, circle, sierpinski, edge_list";

ProfileConfig parse_profile(Checker& chk, const json& v, const std::string& where, const fs::path& base) {
  ProfileConfig p;
  if (v.is_number()) {
    p.kind = "constant";
    p.value = v.get<double>();
    return p;
  }
  if (!v.is_object()) {
    chk.error(where, "expected a number or a profile object");
    return p;
  }
  chk.allow_only(v, where,
                 {"profile", "value", "amplitude", "frequency", "offset", "floor", "vertex", "scale", "values", "path"});
  p.kind = chk.string(v, where, "profile", std::string("constant")).value();
  if (p.kind == "zero") {
    p.kind = "constant";
    p.value = 0.0;
  } else if (p.kind == "constant") {
    p.value = chk.number(v, where, "value", 0.0).value();
  } else if (p.kind == "cos" || p.kind == "sin") {
    p.amplitude = chk.number(v, where, "amplitude", 1.0).value();
    p.frequency = chk.number(v, where, "frequency", 1.0).value();
    p.offset = chk.number(v, where, "offset", 0.0).value();
    p.floor = chk.number(v, where, "floor", std::nullopt);
  } else if (p.kind == "dist-to") {
    const auto vertex = chk.integer(v, where, "vertex", 0).value();
    if (vertex < 0) chk.error(where + ".vertex", "must be a nonnegative vertex id");
    p.vertex = static_cast<VertexId>(std::max<std::int64_t>(vertex, 0));
    p.scale = chk.number(v, where, "scale", 1.0).value();
    p.offset = chk.number(v, where, "offset", 0.0).value();
  } else if (p.kind == "values") {
    if (!v.contains("values")) {
      chk.error(where + ".values", "required field is missing");
    } else {
      p.values = chk.number_array(v["values"], where + ".values");
    }
  } else if (p.kind == "csv") {
    p.path = chk.existing_file(v, where, "path", base);
  } else {
    chk.error(where + ".profile", "unknown profile '" + p.kind + "'; supported: " + kProfileKinds);
  }
  return p;
}

SpaceConfig parse_space(Checker& chk, const json& v, const fs::path& base) {
  SpaceConfig s;
  if (!v.is_object()) {
    chk.error("space", "expected an object");
    return s;
  }
  chk.allow_only(v, "space", {"kind", "segments", "length", "level", "path", "coords"});
  s.kind = chk.string(v, "space", "kind", std::nullopt, true).value_or("interval");
  if (s.kind == "interval" || s.kind == "circle") {
    const auto segments = chk.integer(v, "space", "segments", 200).value();
    const std::int64_t min_segments = s.kind == "circle" ? 3 : 1;
    if (segments < min_segments) chk.error("space.segments", "must be at least " + std::to_string(min_segments));
    s.segments = static_cast<std::size_t>(std::max(segments, min_segments));
    s.length = chk.number(v, "space", "length", 1.0).value();
    if (!(s.length > 0.0)) chk.error("space.length", "must be positive");
  } else if (s.kind == "sierpinski") {
    const auto level = chk.integer(v, "space", "level", 3).value();
    if (level < 0 || level > kSierpinskiLevelCap) {
      chk.error("space.level", "must lie in [0, " + std::to_string(kSierpinskiLevelCap) + "]");
    }
    s.level = static_cast<int>(std::clamp<std::int64_t>(level, 0, kSierpinskiLevelCap));
  } else if (s.kind == "edge_list") {
    s.path = chk.existing_file(v, "space", "path", base);
    if (v.contains("coords")) s.coords = chk.existing_file(v, "space", "coords", base);
  } else {
    chk.error("space.kind", "unknown space '" + s.kind + "'; supported: " + kSpaces);
  }
  return s;
}

HamiltonianConfig parse_hamiltonian(Checker& chk, const json& v, const std::string& where, const fs::path& base,
                                    int depth = 0) {
  HamiltonianConfig h;
  if (!v.is_object()) {
    chk.error(where, "expected an object");
    return h;
  }
  if (v.contains("file")) {
    chk.allow_only(v, where, {"file"});
    const fs::path file = chk.existing_file(v, where, "file", base);
    if (file.empty() || !fs::is_regular_file(file)) return h;
    if (depth > 0) {
      chk.error(where + ".file", "hamiltonian files cannot reference further files");
      return h;
    }
    try {
      const json inner = io::read_json(file);
      return parse_hamiltonian(chk, inner, file.string(), file.parent_path(), depth + 1);
    } catch (const Error& e) {
      chk.error(where + ".file", e.what());
      return h;
    }
  }
  chk.allow_only(v, where, {"schema", "family", "a", "potential", "k", "p_cap", "p_grid", "samples"});
  const std::string family = chk.string(v, where, "family", std::nullopt, true).value_or("affine");
  if (family == "affine") {
    h.family = Family::affine;
    if (v.contains("a")) h.a = parse_profile(chk, v["a"], where + ".a", base);
  } else if (family == "power") {
    h.family = Family::power;
    h.k = chk.number(v, where, "k", 2.0).value();
    if (!(h.k >= 1.0)) chk.error(where + ".k", "power exponent must be >= 1");
  } else if (family == "tabulated") {
    h.family = Family::tabulated;
  } else {
    chk.error(where + ".family", "unknown Hamiltonian family '" + family + "'; supported: " + kFamilies);
    return h;
  }
  if (h.family == Family::tabulated) {
    if (!v.contains("p_grid")) {
      chk.error(where + ".p_grid", "required field is missing");
    } else {
      h.p_grid = chk.number_array(v["p_grid"], where + ".p_grid");
    }
    if (!v.contains("samples") || !v["samples"].is_array() || v["samples"].empty()) {
      chk.error(where + ".samples", "expected a nonempty array of sample rows");
    } else {
      const json& rows = v["samples"];
      if (rows.front().is_number()) {
        h.samples.push_back(chk.number_array(rows, where + ".samples"));
      } else {
        for (std::size_t r = 0; r < rows.size(); ++r) {
          h.samples.push_back(chk.number_array(rows[r], where + ".samples[" + std::to_string(r) + "]"));
        }
      }
    }
    for (std::size_t i = 1; i < h.p_grid.size(); ++i) {
      if (!(h.p_grid[i] > h.p_grid[i - 1])) chk.error(where + ".p_grid", "must be strictly increasing");
    }
    if (!h.p_grid.empty() && h.p_grid.front() != 0.0) chk.error(where + ".p_grid", "must start at 0");
    for (std::size_t r = 0; r < h.samples.size(); ++r) {
      const auto& row = h.samples[r];
      if (row.size() != h.p_grid.size()) {
        chk.error(where + ".samples[" + std::to_string(r) + "]", "length differs from p_grid");
      }
      for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i] < row[i - 1]) {
          chk.error(where + ".samples[" + std::to_string(r) + "]", "curve must be nondecreasing in p");
          break;
        }
      }
    }
  } else {
    if (v.contains("potential")) h.potential = parse_profile(chk, v["potential"], where + ".potential", base);
    h.p_cap = chk.number(v, where, "p_cap", kDefaultPCap).value();
    if (!(h.p_cap > 0.0)) chk.error(where + ".p_cap", "must be positive");
  }
  return h;
}

}  // namespace

ValidationResult validate_config(const json& doc, const fs::path& base_dir) {
  ValidationResult result;
  Checker chk(result.errors);
  if (!doc.is_object()) {
    result.errors.push_back("config: expected a JSON object at the top level");
    return result;
  }
  chk.allow_only(doc, "config", {"schema", "space", "hamiltonian", "initial", "t_end", "store_every", "cfl_factor",
                                 "tolerances", "output", "seed"});
  ExperimentConfig cfg;
  cfg.schema = chk.string(doc, "", "schema", std::nullopt, true).value_or(kConfigSchema);
  if (cfg.schema != kConfigSchema) {
    chk.error("schema", "unsupported schema '" + cfg.schema + "'; expected '" + kConfigSchema + "'");
  }
  if (doc.contains("space")) {
    cfg.space = parse_space(chk, doc["space"], base_dir);
  } else {
    chk.error("space", "required field is missing");
  }
  if (doc.contains("hamiltonian")) {
    cfg.hamiltonian = parse_hamiltonian(chk, doc["hamiltonian"], "hamiltonian", base_dir);
  } else {
    chk.error("hamiltonian", "required field is missing");
  }
  if (doc.contains("initial")) {
    const json& init = doc["initial"];
    if (init.is_object() && init.contains("shift")) {
      json copy = init;
      copy.erase("shift");
      cfg.initial_shift = chk.number(init, "initial", "shift", 0.0).value();
      cfg.initial = parse_profile(chk, copy, "initial", base_dir);
    } else {
      cfg.initial = parse_profile(chk, init, "initial", base_dir);
    }
  } else {
    cfg.initial = constant_profile(0.0);
  }

  cfg.t_end = chk.number(doc, "", "t_end", std::nullopt, true).value_or(1.0);
  if (doc.contains("t_end") && doc["t_end"].is_number() && !(cfg.t_end > 0.0)) {
    chk.error("t_end", "must be positive");
  }
  const auto store_every = chk.integer(doc, "", "store_every", 1).value();
  if (store_every < 1) chk.error("store_every", "must be at least 1");
  cfg.store_every = static_cast<std::size_t>(std::max<std::int64_t>(store_every, 1));
  cfg.cfl_factor = chk.number(doc, "", "cfl_factor", kDefaultCflFactor).value();
  if (!(cfg.cfl_factor > 0.0 && cfg.cfl_factor <= 1.0)) chk.error("cfl_factor", "must lie in (0, 1]");

  if (doc.contains("tolerances")) {
    const json& tol = doc["tolerances"];
    if (!tol.is_object()) {
      chk.error("tolerances", "expected an object");
    } else {
      chk.allow_only(tol, "tolerances", {"aubry", "cmp", "convergence"});
      cfg.tol_aubry = chk.number(tol, "tolerances", "aubry", kTolAubry).value();
      cfg.tol_cmp = chk.number(tol, "tolerances", "cmp", std::nullopt);
      cfg.tol_convergence = chk.number(tol, "tolerances", "convergence", std::nullopt);
      if (!(cfg.tol_aubry > 0.0)) chk.error("tolerances.aubry", "must be positive");
      if (cfg.tol_cmp && !(*cfg.tol_cmp > 0.0)) chk.error("tolerances.cmp", "must be positive");
      if (cfg.tol_convergence && !(*cfg.tol_convergence > 0.0)) chk.error("tolerances.convergence", "must be positive");
    }
  }
  cfg.output = chk.string(doc, "", "output", std::string("out")).value();
  const auto seed = chk.integer(doc, "", "seed", 0).value();
  if (seed < 0) chk.error("seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(std::max<std::int64_t>(seed, 0));

  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

ValidationResult validate_config(const fs::path& path, const std::vector<std::string>& overrides) {
  ValidationResult result;
  json doc;
  try {
    doc = io::read_json(path);
    apply_overrides(doc, overrides);
  } catch (const Error& e) {
    result.errors.push_back(e.what());
    return result;
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return validate_config(doc, base);
}

// -- builders ---------------------------------------------------------------

namespace {

json profile_json(const ProfileConfig& p) {
  json j{{"profile", p.kind}};
  if (p.kind == "constant") j["value"] = p.value;
  if (p.kind == "cos" || p.kind == "sin") {
    j["amplitude"] = p.amplitude;
    j["frequency"] = p.frequency;
    j["offset"] = p.offset;
    if (p.floor) j["floor"] = *p.floor;
  }
  if (p.kind == "dist-to") {
    j["vertex"] = p.vertex;
    j["scale"] = p.scale;
    j["offset"] = p.offset;
  }
  if (p.kind == "values") j["values"] = p.values;
  if (p.kind == "csv") j["path"] = p.path.string();
  return j;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json space{{"kind", c.space.kind}};
  if (c.space.kind == "interval" || c.space.kind == "circle") {
    space["segments"] = c.space.segments;
    space["length"] = c.space.length;
  } else if (c.space.kind == "sierpinski") {
    space["level"] = c.space.level;
  } else {
    space["path"] = c.space.path.string();
    if (c.space.coords) space["coords"] = c.space.coords->string();
  }
  json ham{{"family", std::string(to_string(c.hamiltonian.family))}};
  if (c.hamiltonian.family == Family::tabulated) {
    ham["p_grid"] = c.hamiltonian.p_grid;
    ham["samples"] = c.hamiltonian.samples;
  } else {
    if (c.hamiltonian.family == Family::affine) ham["a"] = profile_json(c.hamiltonian.a);
    if (c.hamiltonian.family == Family::power) ham["k"] = c.hamiltonian.k;
    ham["potential"] = profile_json(c.hamiltonian.potential);
    ham["p_cap"] = c.hamiltonian.p_cap;
  }
  json initial = profile_json(c.initial);
  initial["shift"] = c.initial_shift;
  return json{{"schema", c.schema},
              {"space", space},
              {"hamiltonian", ham},
              {"initial", initial},
              {"t_end", c.t_end},
              {"store_every", c.store_every},
              {"cfl_factor", c.cfl_factor},
              {"tolerances",
               {{"aubry", c.tol_aubry},
                {"cmp", c.tol_cmp ? json(*c.tol_cmp) : json(nullptr)},
                {"convergence", c.tol_convergence ? json(*c.tol_convergence) : json(nullptr)}}},
              {"output", c.output.string()},
              {"seed", c.seed}};
}

MetricGraph build_space(const SpaceConfig& space) {
  if (space.kind == "interval") return build_interval(space.segments, space.length);
  if (space.kind == "circle") return build_circle(space.segments, space.length);
  if (space.kind == "sierpinski") return build_sierpinski(space.level);
  if (space.kind == "edge_list") return io::read_edge_list(space.path, space.coords);
  throw Error(Errc::invalid_argument, "unknown space '" + space.kind + "'; supported: " + kSpaces);
}

NodeFunction build_profile(const MetricGraph& g, const ProfileConfig& p) {
  const std::size_t n = g.vertex_count();
  std::vector<double> values(n);
  if (p.kind == "constant" || p.kind == "zero") {
    std::fill(values.begin(), values.end(), p.kind == "zero" ? 0.0 : p.value);
  } else if (p.kind == "cos" || p.kind == "sin") {
    if (!g.has_coords()) {
      throw Error(Errc::invalid_argument, "profile '" + p.kind + "' needs embedding coordinates on the space");
    }
    const bool is_cos = p.kind == "cos";
    for (std::size_t v = 0; v < n; ++v) {
      const double arg = 2.0 * M_PI * p.frequency * g.coords()[v].x;
      double f = p.amplitude * (is_cos ? std::cos(arg) : std::sin(arg)) + p.offset;
      if (p.floor) f = std::max(f, *p.floor);
      values[v] = f;
    }
  } else if (p.kind == "dist-to") {
    g.require_vertex(p.vertex);
    const auto d = distances_from(g, p.vertex);
    for (std::size_t v = 0; v < n; ++v) values[v] = p.scale * d[v] + p.offset;
  } else if (p.kind == "values") {
    values = p.values;
  } else if (p.kind == "csv") {
    return io::read_node_function(p.path, g);
  } else {
    throw Error(Errc::invalid_argument, "unknown profile '" + p.kind + "'; supported: " + kProfileKinds);
  }
  return NodeFunction(g, std::move(values));
}

Hamiltonian build_hamiltonian(const MetricGraph& g, const HamiltonianConfig& cfg) {
  switch (cfg.family) {
    case Family::affine: {
      const auto a = build_profile(g, cfg.a);
      const auto f = build_profile(g, cfg.potential);
      return Hamiltonian::affine(g, {a.values().begin(), a.values().end()}, {f.values().begin(), f.values().end()},
                                 cfg.p_cap);
    }
    case Family::power: {
      const auto f = build_profile(g, cfg.potential);
      return Hamiltonian::power(g, cfg.k, {f.values().begin(), f.values().end()}, cfg.p_cap);
    }
    case Family::tabulated: {
      Hamiltonian H = Hamiltonian::tabulated(g, cfg.p_grid, cfg.samples);
      if (!H.monotone()) throw Error(Errc::invalid_argument, "tabulated Hamiltonian must be nondecreasing in p");
      return H;
    }
  }
  throw Error(Errc::invalid_argument, "unknown Hamiltonian family");
}

// -- run --------------------------------------------------------------------

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::invalid_argument:
    case Errc::io: return exit_code::config;
    case Errc::invariant_violation: return exit_code::invariant;
    default: return exit_code::numerical;
  }
}

json invariant_json(const std::vector<InvariantCheck>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"ok", c.ok}, {"value", c.value}, {"limit", c.limit}});
  return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  RunResult result;
  result.output = config.output;
  json summary{{"schema", "wkam.summary/1"}, {"config", to_json(config)}};
  std::vector<std::string> files;
  auto write_summary = [&] {
    summary["exit_code"] = result.exit_code;
    summary["status"] = result.exit_code == exit_code::ok ? "pass" : "fail";
    summary["message"] = result.message;
    summary["invariants"] = invariant_json(result.invariants);
    summary["files"] = files;
    result.summary = summary;
    try {
      io::write_json(config.output / "summary.json", summary);
    } catch (const std::exception&) {
      // output directory unusable; the caller still gets the in-memory summary
    }
  };

  try {
    fs::create_directories(config.output);
    const MetricGraph g = build_space(config.space);
    const Hamiltonian H = build_hamiltonian(g, config.hamiltonian);
    const NodeFunction u0 = build_profile(g, config.initial).shifted(config.initial_shift);
    summary["vertices"] = g.vertex_count();
    summary["edges"] = g.edge_count();
    summary["h"] = g.max_edge_length();

    const CriticalData crit = critical_data(g, H, config.tol_aubry);
    const AssumptionReport audit = check_assumptions(g, H, 64, &u0);
    summary["c"] = crit.c;
    summary["aubry_size"] = crit.aubry.size();
    summary["L"] = audit.L ? json(*audit.L) : json(nullptr);
    summary["K"] = audit.K ? json(*audit.K) : json(nullptr);
    summary["assumptions"] = {{"convexity_ok", audit.convexity_ok},
                              {"coercivity_ok", audit.coercivity_ok},
                              {"bounded_at_zero_ok", audit.bounded_at_zero_ok},
                              {"monotone_ok", audit.monotone_ok}};
    io::write_json(config.output / "critical.json", io::critical_summary(crit));
    files.push_back("critical.json");
    io::write_node_function(config.output / "critical.csv", crit.sigma);
    files.push_back("critical.csv");

    const std::size_t written = std::min(crit.aubry.size(), kMaxPotentialFiles);
    for (std::size_t i = 0; i < written; ++i) {
      const VertexId y = crit.aubry[i];
      const std::string name = "s_potential_" + std::to_string(y) + ".csv";
      io::write_node_function(config.output / name, mane_potential(g, crit.sigma, y));
      files.push_back(name);
    }

    SolveOptions opts;
    opts.store_every = config.store_every;
    opts.cfl_factor = config.cfl_factor;
    const EvolutionTrace trace = solve(g, H, u0, config.t_end, opts);
    summary["dt"] = trace.dt;
    summary["steps"] = trace.steps;
    summary["cfl_restarts"] = trace.restarts;

    const NodeFunction phi_m = phi_minus(trace, crit.c);
    const NodeFunction phi_inf = phi_infinity(g, crit.sigma, phi_m, crit.aubry);
    const double tol = config.tol_convergence.value_or(scheme_tolerance(g, trace.dt));
    const double tol_cmp = config.tol_cmp.value_or(default_tol_cmp(phi_m));
    const ConvergenceReport conv = convergence_report(trace, crit.c, phi_inf, tol, crit.aubry);
    summary["tol"] = tol;
    summary["tol_cmp"] = tol_cmp;
    summary["final_gap"] = conv.final_gap;
    summary["t_star"] = conv.t_star ? json(*conv.t_star) : json(nullptr);

    io::write_node_function(config.output / "phi_minus.csv", phi_m);
    files.push_back("phi_minus.csv");
    io::write_node_function(config.output / "phi_infinity.csv", phi_inf);
    files.push_back("phi_infinity.csv");
    io::write_trace(config.output / "trace.csv", trace);
    files.push_back("trace.csv");
    io::write_json(config.output / "trace_meta.json", io::trace_metadata(trace));
    files.push_back("trace_meta.json");
    io::write_convergence_csv(config.output / "convergence.csv", conv);
    files.push_back("convergence.csv");
    io::write_json(config.output / "convergence.json", io::convergence_json(conv));
    files.push_back("convergence.json");

    auto check = [&](std::string name, double value, double limit) {
      result.invariants.push_back({std::move(name), value <= limit, value, limit});
    };
    check("aubry_monotone", conv.aubry_max_violation, conv.aubry_slack);

    double on_aubry = 0.0;
    for (VertexId a : crit.aubry) on_aubry = std::max(on_aubry, std::abs(phi_inf[a] - phi_m[a]));
    check("phi_agree_on_aubry", on_aubry, tol_cmp);

    // sandwich around the stationary solution v0 = S(., y)
    const NodeFunction v0 = mane_potential(g, crit.sigma, crit.aubry.front());
    const double M = sup_distance(u0, v0);
    double sandwich = 0.0;
    double below_trace = 0.0;
    for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
      const double ct = crit.c * trace.times[k];
      for (std::size_t x = 0; x < g.vertex_count(); ++x) {
        const double w = trace.snapshots[k][x] + ct;
        sandwich = std::max(sandwich, std::abs(w - v0[x]) - M);
        below_trace = std::max(below_trace, phi_m[x] - w);
      }
    }
    check("sandwich", sandwich, tol);
    check("phi_minus_below_trace", below_trace, 0.0);

    const auto res_inf = stationary_residual(g, H, phi_inf, crit.c, crit.aubry, config.tol_aubry);
    check("phi_infinity_residual", std::max(res_inf.max_sub_violation, res_inf.max_super_violation), tol);
    // reported only: phi_- keeps u0 wherever u + ct never dips below its start, so it need not be stationary
    const auto res_m = stationary_residual(g, H, phi_m, crit.c, crit.aubry, config.tol_aubry);
    summary["diagnostics"] = {{"phi_minus_sub_violation", res_m.max_sub_violation},
                              {"phi_minus_super_violation", res_m.max_super_violation}};
    check("convergence", conv.final_gap, tol);

    std::vector<std::string> failed;
    for (const auto& c : result.invariants)
      if (!c.ok) failed.push_back(c.name);
    if (failed.empty()) {
      result.exit_code = exit_code::ok;
      result.message = "ok";
    } else {
      result.exit_code = exit_code::invariant;
      std::ostringstream msg;
      msg << "invariant violated:";
      for (const auto& f : failed) msg << ' ' << f;
      result.message = msg.str();
    }
  } catch (const InvariantViolation& e) {
    result.exit_code = exit_code::invariant;
    result.message = std::string("invariant violated: ") + e.what();
    result.invariants.push_back({e.name(), false, 0.0, 0.0});
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e);
    result.message = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const fs::filesystem_error& e) {
    result.exit_code = exit_code::config;
    result.message = std::string("io: ") + e.what();
  }
  write_summary();
  return result;
}

SuiteResult run_suite(const std::vector<fs::path>& configs, const fs::path& out_dir,
                      const std::vector<std::string>& overrides) {
  if (configs.empty()) throw Error(Errc::invalid_argument, "suite needs at least one config");
  SuiteResult suite;
  json entries = json::array();
  std::size_t passed = 0;
  for (const fs::path& path : configs) {
    json entry{{"config", path.string()}};
    ValidationResult v = validate_config(path, overrides);
    if (!v.ok()) {
      entry["exit_code"] = exit_code::config;
      entry["status"] = "fail";
      entry["errors"] = v.errors;
    } else {
      const RunResult r = run_experiment(*v.config);
      entry["exit_code"] = r.exit_code;
      entry["status"] = r.exit_code == exit_code::ok ? "pass" : "fail";
      entry["message"] = r.message;
      entry["output"] = r.output.string();
      entry["final_gap"] = r.summary.value("final_gap", json(nullptr));
      entry["tol"] = r.summary.value("tol", json(nullptr));
      if (r.exit_code == exit_code::ok) ++passed;
    }
    entries.push_back(std::move(entry));
  }
  suite.exit_code = passed == configs.size() ? exit_code::ok : exit_code::suite_failure;
  suite.report = json{{"schema", "wkam.suite/1"},
                      {"total", configs.size()},
                      {"passed", passed},
                      {"failed", configs.size() - passed},
                      {"experiments", entries}};
  io::write_json(out_dir / "suite.json", suite.report);
  return suite;
}

}  // namespace wkam
