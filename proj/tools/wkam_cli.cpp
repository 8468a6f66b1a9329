// wkam: run weak KAM / large-time experiments from JSON configs.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "wkam/experiment.hpp"
#include "wkam/io.hpp"

namespace {

using namespace wkam;

// `--a.b=v` or `--a.b v` left over after CLI11 parsing become overrides.
bool collect_dotted(const std::vector<std::string>& extras, std::vector<std::string>& overrides) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.find('.') == std::string::npos) {
      std::cerr << "error: unexpected argument '" << arg << "'\n";
      return false;
    }
    std::string body = arg.substr(2);
    if (body.find('=') == std::string::npos) {
      if (i + 1 >= extras.size()) {
        std::cerr << "error: override " << arg << " needs a value\n";
        return false;
      }
      body += "=" + extras[++i];
    }
    overrides.push_back(body);
  }
  return true;
}

void print_errors(const std::string& path, const std::vector<std::string>& errors) {
  std::cerr << path << ": " << errors.size() << (errors.size() == 1 ? " error\n" : " errors\n");
  for (const auto& e : errors) std::cerr << "  " << e << '\n';
}

int cmd_validate(const std::string& path, const std::vector<std::string>& overrides) {
  const ValidationResult v = validate_config(path, overrides);
  if (!v.ok()) {
    print_errors(path, v.errors);
    return exit_code::config;
  }
  std::cout << to_json(*v.config).dump(2) << '\n';
  return exit_code::ok;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides) {
  const ValidationResult v = validate_config(path, overrides);
  if (!v.ok()) {
    print_errors(path, v.errors);
    return exit_code::config;
  }
  const RunResult r = run_experiment(*v.config);
  for (const auto& c : r.invariants) {
    std::cerr << (c.ok ? "  ok    " : "  FAIL  ") << c.name << "  " << io::format_number(c.value)
              << " <= " << io::format_number(c.limit) << '\n';
  }
  if (r.exit_code == exit_code::ok) {
    std::cout << "ok: c=" << io::format_number(r.summary.value("c", 0.0))
              << " final_gap=" << io::format_number(r.summary.value("final_gap", 0.0))
              << " tol=" << io::format_number(r.summary.value("tol", 0.0)) << " -> " << r.output.string() << '\n';
  } else {
    std::cerr << "error: " << r.message << '\n';
  }
  return r.exit_code;
}

int cmd_suite(const std::vector<std::string>& paths, const std::string& out_dir,
              const std::vector<std::string>& overrides) {
  if (paths.empty()) {
    std::cerr << "usage: wkam suite <config>... [--out DIR]\n";
    return exit_code::config;
  }
  std::vector<fs::path> configs(paths.begin(), paths.end());
  try {
    fs::create_directories(out_dir);
    const SuiteResult s = run_suite(configs, out_dir, overrides);
    for (const auto& e : s.report["experiments"]) {
      std::cout << e["status"].get<std::string>() << "  " << e["config"].get<std::string>();
      if (e.contains("message")) std::cout << "  " << e["message"].get<std::string>();
      std::cout << '\n';
    }
    std::cout << s.report["passed"] << "/" << s.report["total"] << " passed\n";
    return s.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::config;
  }
}

int cmd_space(const std::string& builtin, const std::string& out, std::size_t segments, double length, int level,
              const std::string& coords_out) {
  try {
    SpaceConfig s;
    s.kind = builtin;
    s.segments = segments;
    s.length = length;
    s.level = level;
    if (builtin == "edge_list") throw Error(Errc::invalid_argument, "space expects a builtin, not edge_list");
    const MetricGraph g = build_space(s);
    io::write_edge_list(out, g);
    if (!coords_out.empty()) io::write_coords(coords_out, g);
    std::cout << g.vertex_count() << " vertices, " << g.edge_count() << " edges -> " << out << '\n';
    return exit_code::ok;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::resource_limit ? exit_code::numerical : exit_code::config;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak KAM experiments on metric graphs"};
  app.require_subcommand(1);
  std::vector<std::string> sets;
  app.add_option("--set", sets, "override a config field, path.to.field=value")->take_all();

  std::string config;
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("config", config, "experiment config (JSON)")->required();
  run->allow_extras();

  auto* validate = app.add_subcommand("validate", "check a config and print it with defaults filled in");
  validate->add_option("config", config, "experiment config (JSON)")->required();
  validate->allow_extras();

  std::vector<std::string> suite_paths;
  std::string suite_out = ".";
  auto* suite = app.add_subcommand("suite", "run several experiments and write suite.json");
  suite->add_option("configs", suite_paths, "experiment configs");
  suite->add_option("--out", suite_out, "directory for suite.json");
  suite->allow_extras();

  std::string builtin, space_out, coords_out;
  std::size_t segments = 200;
  double length = 1.0;
  int level = 3;
  auto* space = app.add_subcommand("space", "write a builtin space as an edge list");
  space->add_option("builtin", builtin, "interval | circle | sierpinski")->required();
  space->add_option("--out", space_out, "edge list path")->required();
  space->add_option("--segments", segments, "interval/circle segments");
  space->add_option("--length", length, "interval length or circumference");
  space->add_option("--level", level, "sierpinski level");
  space->add_option("--coords", coords_out, "also write vertex coordinates here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_code::config;
  }

  std::vector<std::string> overrides;
  for (const auto& s : sets) overrides.push_back(s);
  for (auto* sub : {run, validate, suite}) {
    if (sub->parsed() && !collect_dotted(sub->remaining(), overrides)) return exit_code::config;
  }

  if (run->parsed()) return cmd_run(config, overrides);
  if (validate->parsed()) return cmd_validate(config, overrides);
  if (suite->parsed()) return cmd_suite(suite_paths, suite_out, overrides);
  return cmd_space(builtin, space_out, segments, length, level, coords_out);
}
