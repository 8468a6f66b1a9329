#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wkam/asymptotics.hpp"
#include "wkam/evolution.hpp"
#include "wkam/metric_graph.hpp"
#include "wkam/weak_kam.hpp"

namespace wkam::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Decimal with 17 significant digits (round-trips every double).
std::string format_number(double value);

// Edge list: one `u v length` record per line, `#` starts a comment.
// Vertex ids must be dense: the vertex count is the largest id plus one.
MetricGraph read_edge_list(const fs::path& edges, const std::optional<fs::path>& coords = std::nullopt);
MetricGraph parse_edge_list(const std::string& text, const std::string& source_name = "<edge list>",
                            std::vector<Point> coords = {});
void write_edge_list(const fs::path& path, const MetricGraph& g);
/// `id x y` per line; only meaningful for graphs with coordinates.
void write_coords(const fs::path& path, const MetricGraph& g);
std::vector<Point> read_coords(const fs::path& path);

// NodeFunction CSV with header `vertex_id,value`.
void write_node_function(const fs::path& path, const NodeFunction& f);
NodeFunction read_node_function(const fs::path& path, const MetricGraph& g);

// Trace CSV with header `t,vertex_id,value`, plus run metadata.
void write_trace(const fs::path& path, const EvolutionTrace& trace);
EvolutionTrace read_trace(const fs::path& path, const MetricGraph& g);
json trace_metadata(const EvolutionTrace& trace);

json critical_summary(const CriticalData& crit);

json convergence_json(const ConvergenceReport& report);
/// Companion CSV with header `t,gap`.
void write_convergence_csv(const fs::path& path, const ConvergenceReport& report);
std::vector<std::pair<double, double>> read_convergence_csv(const fs::path& path);

void write_json(const fs::path& path, const json& value);
json read_json(const fs::path& path);
std::string read_text(const fs::path& path);

}  // namespace wkam::io
