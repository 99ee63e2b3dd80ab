#include "equiloc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "equiloc/csv.hpp"
#include "equiloc/error.hpp"
#include "equiloc/hash.hpp"

namespace equiloc {

DistanceMatrix DistanceMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  DistanceMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw ValidationError("distance matrix row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " entries, expected " +
                            std::to_string(rows.size()));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Instance::Instance(std::vector<Node> nodes, DistanceMatrix distance, DemandProfile demand,
                   int p)
    : nodes_(std::move(nodes)),
      distance_(std::move(distance)),
      demand_(std::move(demand)),
      p_(p) {
  const std::size_t n = nodes_.size();
  if (n == 0) throw ValidationError("instance has no nodes");
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes_[i].id != static_cast<int>(i)) {
      throw ValidationError("node ids must be contiguous from 0; position " +
                            std::to_string(i) + " holds id " +
                            std::to_string(nodes_[i].id));
    }
    if (nodes_[i].population < 0) {
      throw ValidationError("node " + std::to_string(i) + " has negative population");
    }
  }
  if (distance_.size() != n) {
    throw ValidationError("distance matrix is " + std::to_string(distance_.size()) +
                          "x" + std::to_string(distance_.size()) + " but there are " +
                          std::to_string(n) + " nodes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = distance_(i, j);
      if (!std::isfinite(d) || d < 0.0) {
        throw ValidationError("distance(" + std::to_string(i) + "," + std::to_string(j) +
                              ") must be finite and non-negative");
      }
    }
    if (distance_(i, i) != 0.0) {
      throw ValidationError("distance(" + std::to_string(i) + "," + std::to_string(i) +
                            ") must be 0");
    }
  }
  if (demand_.mean.size() != n || demand_.std.size() != n) {
    throw ValidationError("demand vectors must have one entry per node");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(demand_.mean[i]) || demand_.mean[i] < 0.0 ||
        !std::isfinite(demand_.std[i]) || demand_.std[i] < 0.0) {
      throw ValidationError("demand of node " + std::to_string(i) +
                            " must be finite and non-negative");
    }
  }
  if (p_ < 1 || static_cast<std::size_t>(p_) > n) {
    throw ValidationError("p must lie in [1, " + std::to_string(n) + "], got " +
                          std::to_string(p_));
  }
}

long long Instance::total_population() const {
  long long total = 0;
  for (const Node& node : nodes_) total += node.population;
  return total;
}

Instance Instance::with_p(int p) const { return Instance(nodes_, distance_, demand_, p); }

std::uint64_t Instance::fingerprint() const {
  Fnv1a h;
  h.str("equiloc.instance.v1").u64(nodes_.size());
  for (const Node& node : nodes_) {
    h.u64(static_cast<std::uint64_t>(node.id)).str(node.name);
    h.u64(static_cast<std::uint64_t>(node.population));
    h.u64(node.coordinates.has_value());
    if (node.coordinates) h.f64(node.coordinates->lat_deg).f64(node.coordinates->lon_deg);
  }
  h.f64s(distance_.values()).f64s(demand_.mean).f64s(demand_.std);
  return h.value();
}

bool Instance::operator==(const Instance& other) const {
  if (nodes_.size() != other.nodes_.size() || p_ != other.p_) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.id != b.id || a.name != b.name || a.population != b.population) return false;
    if (a.coordinates.has_value() != b.coordinates.has_value()) return false;
    if (a.coordinates && (a.coordinates->lat_deg != b.coordinates->lat_deg ||
                          a.coordinates->lon_deg != b.coordinates->lon_deg)) {
      return false;
    }
  }
  return distance_ == other.distance_ && demand_.mean == other.demand_.mean &&
         demand_.std == other.demand_.std;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  const double lat1 = a.lat_deg * kDegToRad;
  const double lat2 = b.lat_deg * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

DistanceMatrix build_distance_matrix(std::span<const Node> nodes, double speed_kmh,
                                     double circuity) {
  if (!(speed_kmh > 0.0)) throw ConfigError("speed must be positive");
  if (!(circuity >= 1.0)) throw ConfigError("circuity must be at least 1");
  for (const Node& node : nodes) {
    if (!node.coordinates) {
      throw ConfigError("node " + std::to_string(node.id) + " (" + node.name +
                        ") has no coordinates");
    }
  }
  DistanceMatrix m(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i == j) continue;
      const double km = haversine_km(*nodes[i].coordinates, *nodes[j].coordinates);
      m(i, j) = km * circuity / speed_kmh * 60.0;
    }
  }
  return m;
}

DemandProfile derive_demand(std::span<const Node> nodes, double total_demand,
                            double std_factor) {
  if (!(total_demand > 0.0)) throw ValidationError("total demand must be positive");
  if (!(std_factor >= 0.0)) throw ValidationError("std factor must be non-negative");
  long long total = 0;
  for (const Node& node : nodes) total += node.population;
  if (total <= 0) throw ValidationError("total population is zero");
  DemandProfile demand;
  demand.mean.reserve(nodes.size());
  demand.std.reserve(nodes.size());
  for (const Node& node : nodes) {
    const double mu = static_cast<double>(node.population) / static_cast<double>(total) *
                      total_demand;
    demand.mean.push_back(mu);
    demand.std.push_back(std_factor * mu);
  }
  return demand;
}

std::vector<long long> rounded_demand(std::span<const double> demand_mean) {
  std::vector<long long> out;
  out.reserve(demand_mean.size());
  for (double mu : demand_mean) out.push_back(std::llround(mu));
  return out;
}

namespace {

std::vector<std::string> split_text_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (!lines.empty() && lines.front().rfind("\xEF\xBB\xBF", 0) == 0) {
    lines.front().erase(0, 3);
  }
  return lines;
}

bool blank(const std::string& s) { return csv::trim(s).empty(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DistanceMatrix parse_distance_csv(const std::string& text) {
  const auto lines = split_text_lines(text);
  double scale = 1.0;
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string line = csv::trim(lines[k]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("units=");
      if (pos != std::string::npos) {
        const std::string unit = csv::trim(line.substr(pos + 6));
        if (unit == "minutes") {
          scale = 1.0;
        } else if (unit == "hours") {
          scale = 60.0;
        } else if (unit == "seconds") {
          scale = 1.0 / 60.0;
        } else {
          throw ParseError("distance CSV line " + std::to_string(k + 1) +
                           ": unknown unit '" + unit + "'");
        }
      }
      continue;
    }
    std::vector<double> row;
    for (const std::string& field : csv::split_record(line)) {
      double v = 0.0;
      if (!csv::parse_double(field, v)) {
        throw ParseError("distance CSV line " + std::to_string(k + 1) +
                         ": not a number: '" + field + "'");
      }
      row.push_back(v * scale);
    }
    rows.push_back(std::move(row));
  }
  DistanceMatrix m = DistanceMatrix::from_rows(rows);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m(i, i) != 0.0) {
      throw ValidationError("distance CSV diagonal entry " + std::to_string(i) +
                            " must read 0");
    }
  }
  return m;
}

}  // namespace

Instance parse_instance(const std::string& nodes_csv,
                        const std::optional<std::string>& distance_csv,
                        const LoadOptions& options) {
  const auto lines = split_text_lines(nodes_csv);
  std::size_t first = 0;
  while (first < lines.size() && blank(lines[first])) ++first;
  if (first == lines.size()) throw ParseError("nodes CSV is empty");

  const auto header = csv::split_record(lines[first]);
  auto column = [&](std::string_view name) -> int {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return static_cast<int>(c);
    }
    return -1;
  };
  const int c_id = column("id");
  const int c_name = column("name");
  const int c_pop = column("population");
  const int c_lat = column("lat");
  const int c_lon = column("lon");
  const int c_mean = column("demand_mean");
  const int c_std = column("demand_std");
  if (c_id < 0 || c_name < 0 || c_pop < 0) {
    throw ParseError("nodes CSV header must start with id,name,population");
  }
  if ((c_lat < 0) != (c_lon < 0)) throw ParseError("nodes CSV needs both lat and lon");
  if ((c_mean < 0) != (c_std < 0)) {
    throw ParseError("nodes CSV needs both demand_mean and demand_std");
  }

  std::vector<Node> nodes;
  std::vector<double> means;
  std::vector<double> stds;
  for (std::size_t k = first + 1; k < lines.size(); ++k) {
    if (blank(lines[k])) continue;
    const std::string where = "nodes CSV row " + std::to_string(k + 1);
    std::vector<std::string> f;
    try {
      f = csv::split_record(lines[k]);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (f.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(f.size()));
    }
    Node node;
    long long id = 0;
    if (!csv::parse_int(f[c_id], id)) throw ParseError(where + ": bad id '" + f[c_id] + "'");
    node.id = static_cast<int>(id);
    node.name = f[c_name];
    if (!csv::parse_int(f[c_pop], node.population)) {
      throw ParseError(where + ": bad population '" + f[c_pop] + "'");
    }
    if (node.population < 0) throw ValidationError(where + ": negative population");
    if (c_lat >= 0 && !(f[c_lat].empty() && f[c_lon].empty())) {
      GeoPoint g;
      if (!csv::parse_double(f[c_lat], g.lat_deg) || !csv::parse_double(f[c_lon], g.lon_deg)) {
        throw ParseError(where + ": bad coordinates");
      }
      node.coordinates = g;
    }
    if (c_mean >= 0) {
      double mu = 0.0;
      double sd = 0.0;
      if (!csv::parse_double(f[c_mean], mu) || !csv::parse_double(f[c_std], sd)) {
        throw ParseError(where + ": bad demand columns");
      }
      means.push_back(mu);
      stds.push_back(sd);
    }
    nodes.push_back(std::move(node));
  }
  if (nodes.empty()) throw ParseError("nodes CSV has no data rows");

  std::set<int> seen;
  for (const Node& node : nodes) {
    if (!seen.insert(node.id).second) {
      throw ValidationError("duplicate node id " + std::to_string(node.id));
    }
  }
  // Keep the demand columns aligned with the id order.
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes[a].id < nodes[b].id; });
  std::vector<Node> sorted;
  DemandProfile demand;
  for (std::size_t k : order) {
    sorted.push_back(nodes[k]);
    if (c_mean >= 0) {
      demand.mean.push_back(means[k]);
      demand.std.push_back(stds[k]);
    }
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].id != static_cast<int>(i)) {
      throw ValidationError("node ids must be contiguous from 0; missing id " +
                            std::to_string(i));
    }
  }

  DistanceMatrix distance;
  if (distance_csv) {
    distance = parse_distance_csv(*distance_csv);
  } else {
    const bool all_coords = std::all_of(sorted.begin(), sorted.end(),
                                        [](const Node& n) { return n.coordinates.has_value(); });
    if (!all_coords) {
      throw ConfigError("no distance matrix supplied and some nodes lack coordinates");
    }
    distance = build_distance_matrix(sorted, options.speed_kmh, options.circuity);
  }
  if (c_mean < 0) demand = derive_demand(sorted, options.total_demand, options.std_factor);
  return Instance(std::move(sorted), std::move(distance), std::move(demand), options.p);
}

Instance load_instance(const std::string& nodes_path, const LoadOptions& options) {
  std::optional<std::string> distance_text;
  if (options.distance_path) distance_text = read_file(*options.distance_path);
  return parse_instance(read_file(nodes_path), distance_text, options);
}

std::string nodes_to_csv(const Instance& instance) {
  const bool coords = std::any_of(instance.nodes().begin(), instance.nodes().end(),
                                  [](const Node& n) { return n.coordinates.has_value(); });
  std::ostringstream out;
  out << "id,name,population";
  if (coords) out << ",lat,lon";
  out << ",demand_mean,demand_std\n";
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Node& node = instance.node(i);
    out << node.id << ',' << csv::quote(node.name) << ',' << node.population;
    if (coords) {
      if (node.coordinates) {
        out << ',' << csv::format_double(node.coordinates->lat_deg) << ','
            << csv::format_double(node.coordinates->lon_deg);
      } else {
        out << ",,";
      }
    }
    out << ',' << csv::format_double(instance.demand_mean()[i]) << ','
        << csv::format_double(instance.demand_std()[i]) << '\n';
  }
  return out.str();
}

std::string distance_to_csv(const DistanceMatrix& distance) {
  std::ostringstream out;
  for (std::size_t i = 0; i < distance.size(); ++i) {
    for (std::size_t j = 0; j < distance.size(); ++j) {
      if (j) out << ',';
      out << csv::format_double(distance(i, j));
    }
    out << '\n';
  }
  return out.str();
}

void save_instance(const Instance& instance, const std::string& nodes_path,
                   const std::string& distance_path) {
  std::ofstream nodes(nodes_path, std::ios::binary);
  std::ofstream dist(distance_path, std::ios::binary);
  if (!nodes || !dist) throw IoError("cannot write instance files");
  nodes << nodes_to_csv(instance);
  dist << distance_to_csv(instance.distance());
  if (!nodes || !dist) throw IoError("failed writing instance files");
}

Instance resolve_instance(const std::string& source, const LoadOptions& options) {
  if (source == "lehigh") {
    if (options.distance_path) {
      const std::vector<Node> nodes = lehigh_nodes();
      DistanceMatrix distance = parse_distance_csv(read_file(*options.distance_path));
      return Instance(nodes, std::move(distance),
                      derive_demand(nodes, options.total_demand, options.std_factor),
                      options.p);
    }
    return lehigh_instance(options.p, options.total_demand, options.std_factor,
                           options.speed_kmh, options.circuity);
  }
  return load_instance(source, options);
}

}  // namespace equiloc
