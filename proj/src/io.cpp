#include "wkam/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wkam::io {

namespace {

Error parse_error(const std::string& source, std::size_t line, const std::string& what) {
  return Error(Errc::io, source + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  return out;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

double parse_double(const std::string& token, const std::string& source, std::size_t line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw parse_error(source, line, "expected a number, got '" + token + "'");
  return value;
}

std::size_t parse_index(const std::string& token, const std::string& source, std::size_t line) {
  std::size_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw parse_error(source, line, "expected a nonnegative integer vertex id, got '" + token + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  if (sep == ' ') {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r' && ch != ' ') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MetricGraph parse_edge_list(const std::string& text, const std::string& source_name, std::vector<Point> coords) {
  std::istringstream in(text);
  std::string raw;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  std::size_t max_id = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;
    const auto tokens = split(line, ' ');
    if (tokens.size() != 3) throw parse_error(source_name, line_no, "expected `u v length`");
    const Edge e{parse_index(tokens[0], source_name, line_no), parse_index(tokens[1], source_name, line_no),
                 parse_double(tokens[2], source_name, line_no)};
    max_id = std::max({max_id, e.a, e.b});
    edges.push_back(e);
  }
  if (edges.empty()) throw Error(Errc::io, source_name + ": edge list contains no edges");
  try {
    return MetricGraph(max_id + 1, edges, std::move(coords));
  } catch (const Error& e) {
    throw Error(Errc::io, source_name + ": " + e.what(), e.vertex());
  }
}

std::vector<Point> read_coords(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string raw;
  std::vector<std::pair<std::size_t, Point>> records;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;
    const auto tokens = split(line, ' ');
    if (tokens.size() != 3) throw parse_error(path.string(), line_no, "expected `id x y`");
    records.push_back({parse_index(tokens[0], path.string(), line_no),
                       {parse_double(tokens[1], path.string(), line_no), parse_double(tokens[2], path.string(), line_no)}});
  }
  std::vector<Point> coords(records.size());
  std::vector<char> seen(records.size(), 0);
  for (const auto& [id, p] : records) {
    if (id >= coords.size() || seen[id]) {
      throw Error(Errc::io, path.string() + ": coordinate ids must be 0..n-1 without repeats");
    }
    seen[id] = 1;
    coords[id] = p;
  }
  return coords;
}

MetricGraph read_edge_list(const fs::path& edges, const std::optional<fs::path>& coords) {
  std::vector<Point> points;
  if (coords) points = read_coords(*coords);
  return parse_edge_list(read_text(edges), edges.string(), std::move(points));
}

void write_edge_list(const fs::path& path, const MetricGraph& g) {
  auto out = open_out(path);
  out << "# " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
  for (const Edge& e : g.edges()) out << e.a << ' ' << e.b << ' ' << format_number(e.length) << '\n';
}

void write_coords(const fs::path& path, const MetricGraph& g) {
  if (!g.has_coords()) throw Error(Errc::invalid_argument, "graph has no coordinates to write");
  auto out = open_out(path);
  const auto pts = g.coords();
  for (std::size_t v = 0; v < pts.size(); ++v) {
    out << v << ' ' << format_number(pts[v].x) << ' ' << format_number(pts[v].y) << '\n';
  }
}

void write_node_function(const fs::path& path, const NodeFunction& f) {
  auto out = open_out(path);
  out << "vertex_id,value\n";
  for (std::size_t v = 0; v < f.size(); ++v) out << v << ',' << format_number(f[v]) << '\n';
}

NodeFunction read_node_function(const fs::path& path, const MetricGraph& g) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"vertex_id", "value"}) {
    throw parse_error(path.string(), 1, "expected header `vertex_id,value`");
  }
  std::vector<double> values(g.vertex_count(), 0.0);
  std::vector<char> seen(g.vertex_count(), 0);
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw parse_error(path.string(), line_no, "expected `vertex_id,value`");
    const std::size_t v = parse_index(cells[0], path.string(), line_no);
    if (v >= values.size()) throw parse_error(path.string(), line_no, "vertex id outside the graph");
    if (seen[v]) throw parse_error(path.string(), line_no, "duplicate vertex id");
    seen[v] = 1;
    values[v] = parse_double(cells[1], path.string(), line_no);
  }
  const auto missing = std::find(seen.begin(), seen.end(), 0);
  if (missing != seen.end()) {
    throw Error(Errc::io, path.string() + ": no value for vertex " + std::to_string(missing - seen.begin()));
  }
  return NodeFunction(g, std::move(values));
}

void write_trace(const fs::path& path, const EvolutionTrace& trace) {
  auto out = open_out(path);
  out << "t,vertex_id,value\n";
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    const std::string t = format_number(trace.times[k]);
    const auto& u = trace.snapshots[k];
    for (std::size_t v = 0; v < u.size(); ++v) out << t << ',' << v << ',' << format_number(u[v]) << '\n';
  }
}

EvolutionTrace read_trace(const fs::path& path, const MetricGraph& g) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"t", "vertex_id", "value"}) {
    throw parse_error(path.string(), 1, "expected header `t,vertex_id,value`");
  }
  EvolutionTrace trace;
  std::vector<double> current;
  auto flush = [&] {
    if (current.size() != g.vertex_count()) {
      throw parse_error(path.string(), line_no, "incomplete snapshot at t = " + format_number(trace.times.back()));
    }
    trace.snapshots.emplace_back(g, std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw parse_error(path.string(), line_no, "expected `t,vertex_id,value`");
    const double t = parse_double(cells[0], path.string(), line_no);
    const std::size_t v = parse_index(cells[1], path.string(), line_no);
    if (trace.times.empty() || t != trace.times.back()) {
      if (!trace.times.empty()) flush();
      trace.times.push_back(t);
    }
    if (v != current.size()) throw parse_error(path.string(), line_no, "vertex ids must run 0..n-1 per snapshot");
    current.push_back(parse_double(cells[2], path.string(), line_no));
  }
  if (trace.times.empty()) throw Error(Errc::io, path.string() + ": trace is empty");
  flush();
  if (trace.times.size() > 1) trace.dt = trace.times[1] - trace.times[0];
  return trace;
}

json trace_metadata(const EvolutionTrace& trace) {
  return json{{"scheme", trace.scheme},
              {"dt", trace.dt},
              {"cfl_factor", trace.cfl_factor},
              {"steps", trace.steps},
              {"store_every", trace.store_every},
              {"snapshots", trace.snapshots.size()},
              {"restarts", trace.restarts},
              {"slope_bound", trace.slope_bound},
              {"K_barrier", trace.K},
              {"t_end", trace.times.empty() ? 0.0 : trace.times.back()}};
}

json critical_summary(const CriticalData& crit) {
  return json{{"c", crit.c},
              {"aubry_size", crit.aubry.size()},
              {"aubry", crit.aubry},
              {"tol_aubry", crit.tol_aubry},
              {"tol_c", kTolC},
              {"tol_root", kTolRoot}};
}

json convergence_json(const ConvergenceReport& report) {
  json series = json::array();
  for (const auto& [t, gap] : report.gap_series) series.push_back({t, gap});
  return json{{"gap_series", series},
              {"aubry_monotone_ok", report.aubry_monotone_ok},
              {"aubry_max_violation", report.aubry_max_violation},
              {"aubry_slack", report.aubry_slack},
              {"final_gap", report.final_gap},
              {"t_star", report.t_star ? json(*report.t_star) : json(nullptr)},
              {"tol", report.tol}};
}

void write_convergence_csv(const fs::path& path, const ConvergenceReport& report) {
  auto out = open_out(path);
  out << "t,gap\n";
  for (const auto& [t, gap] : report.gap_series) out << format_number(t) << ',' << format_number(gap) << '\n';
}

std::vector<std::pair<double, double>> read_convergence_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"t", "gap"}) {
    throw parse_error(path.string(), 1, "expected header `t,gap`");
  }
  std::vector<std::pair<double, double>> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw parse_error(path.string(), line_no, "expected `t,gap`");
    out.emplace_back(parse_double(cells[0], path.string(), line_no), parse_double(cells[1], path.string(), line_no));
  }
  return out;
}

void write_json(const fs::path& path, const json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line number
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw Error(Errc::io, path.string() + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }
}

}  // namespace wkam::io
