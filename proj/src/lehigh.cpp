#include "equiloc/instance.hpp"

namespace equiloc {

// 2010 census populations. Coordinates are approximate town centres; they
// only feed the travel-time proxy. Easton lies outside Lehigh County but is
// part of the study region.
std::vector<Node> lehigh_nodes() {
  struct Row {
    const char* name;
    long long population;
    double lat;
    double lon;
  };
  static constexpr Row kRows[] = {
      {"Allentown", 118032, 40.6084, -75.4902},
      {"Bethlehem", 74982, 40.6259, -75.3705},
      {"Emmaus", 11211, 40.5395, -75.4968},
      {"Ancient Oaks", 6661, 40.5476, -75.5885},
      {"Catasauqua", 6436, 40.6545, -75.4738},
      {"Wescosville", 5872, 40.5648, -75.5518},
      {"Fountain Hill", 4597, 40.6015, -75.3957},
      {"Dorneyville", 4406, 40.5776, -75.5196},
      {"Slatington", 4232, 40.7484, -75.6121},
      {"Breinigsville", 4138, 40.5367, -75.6313},
      {"Coplay", 3192, 40.6701, -75.4955},
      {"Macungie", 3074, 40.5159, -75.5552},
      {"Schnecksville", 2935, 40.6751, -75.6202},
      {"Coopersburg", 2386, 40.5115, -75.3907},
      {"Alburtis", 2361, 40.5109, -75.6024},
      {"Cetronia", 2115, 40.5873, -75.5299},
      {"Trexlertown", 1988, 40.5487, -75.6052},
      {"Laurys Station", 1243, 40.7223, -75.5302},
      {"New Tripoli", 898, 40.6812, -75.7516},
      {"Slatedale", 751, 40.7443, -75.6699},
      {"Easton", 26800, 40.6884, -75.2207},
  };
  std::vector<Node> nodes;
  int id = 0;
  for (const Row& row : kRows) {
    nodes.push_back(Node{id++, row.name, row.population, GeoPoint{row.lat, row.lon}});
  }
  return nodes;
}

Instance lehigh_instance(int p, double total_demand, double std_factor, double speed_kmh,
                         double circuity) {
  std::vector<Node> nodes = lehigh_nodes();
  DistanceMatrix distance = build_distance_matrix(nodes, speed_kmh, circuity);
  DemandProfile demand = derive_demand(nodes, total_demand, std_factor);
  return Instance(std::move(nodes), std::move(distance), std::move(demand), p);
}

}  // namespace equiloc
