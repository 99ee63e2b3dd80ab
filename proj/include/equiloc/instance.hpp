#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace equiloc {

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

struct Node {
  int id = 0;
  std::string name;
  long long population = 0;
  std::optional<GeoPoint> coordinates;
};

// Dense row-major square matrix. Entry (i, j) is the travel time in minutes
// from node i to node j; symmetry is not assumed.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, double fill = 0.0)
      : n_(n), data_(n * n, fill) {}
  static DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }
  std::span<const double> values() const { return data_; }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct DemandProfile {
  std::vector<double> mean;
  std::vector<double> std;
};

// A facility location instance. Every demand node is also a candidate site.
// Immutable after construction; all fields are validated by the constructor.
class Instance {
 public:
  Instance(std::vector<Node> nodes, DistanceMatrix distance, DemandProfile demand,
           int p);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const DistanceMatrix& distance() const { return distance_; }
  double distance(std::size_t i, std::size_t j) const { return distance_(i, j); }
  const std::vector<double>& demand_mean() const { return demand_.mean; }
  const std::vector<double>& demand_std() const { return demand_.std; }
  int p() const { return p_; }
  long long total_population() const;

  // Same data with a different facility count.
  Instance with_p(int p) const;

  // Stable 64-bit hash over the node and demand data (p excluded); binds
  // scenario sets to the instance they were drawn from.
  std::uint64_t fingerprint() const;

  bool operator==(const Instance&) const;

 private:
  std::vector<Node> nodes_;
  DistanceMatrix distance_;
  DemandProfile demand_;
  int p_;
};

double haversine_km(const GeoPoint& a, const GeoPoint& b);

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultSpeedKmh = 60.0;
inline constexpr double kDefaultCircuity = 1.3;

// Travel-time proxy: great-circle distance stretched by a road circuity
// factor, driven at a constant speed. Throws ConfigError when a node has no
// coordinates.
DistanceMatrix build_distance_matrix(std::span<const Node> nodes,
                                     double speed_kmh = kDefaultSpeedKmh,
                                     double circuity = kDefaultCircuity);

// Mean demand proportional to population share, std a fixed multiple of it.
DemandProfile derive_demand(std::span<const Node> nodes, double total_demand,
                            double std_factor);

// Nearest-integer view of the mean demand, for display only.
std::vector<long long> rounded_demand(std::span<const double> demand_mean);

struct LoadOptions {
  std::optional<std::string> distance_path;
  int p = 1;
  double total_demand = 1000.0;
  double std_factor = 0.5;
  double speed_kmh = kDefaultSpeedKmh;
  double circuity = kDefaultCircuity;
};

// Nodes CSV: header `id,name,population[,lat,lon][,demand_mean,demand_std]`.
// Distance CSV: square matrix, no header, optional leading
// `# units=<minutes|hours|seconds>` line.
Instance load_instance(const std::string& nodes_path, const LoadOptions& options = {});

// Parses in-memory CSV text; `load_instance` is a thin file wrapper.
Instance parse_instance(const std::string& nodes_csv,
                        const std::optional<std::string>& distance_csv,
                        const LoadOptions& options = {});

// Writes both files with full precision; loading them back with the same `p`
// reproduces the instance exactly.
void save_instance(const Instance& instance, const std::string& nodes_path,
                   const std::string& distance_path);

std::string nodes_to_csv(const Instance& instance);
std::string distance_to_csv(const DistanceMatrix& distance);

// The bundled 21-node Lehigh Valley case study (2010 census populations).
std::vector<Node> lehigh_nodes();
Instance lehigh_instance(int p = 1, double total_demand = 1000.0,
                         double std_factor = 0.5,
                         double speed_kmh = kDefaultSpeedKmh,
                         double circuity = kDefaultCircuity);

// Convenience used by the CLI and experiment config: "lehigh" selects the
// bundled data, anything else is a nodes CSV path.
Instance resolve_instance(const std::string& source, const LoadOptions& options);

}  // namespace equiloc
