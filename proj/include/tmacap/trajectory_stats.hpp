#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Extraction of model inputs from pre-cleaned trajectory point data: per-path
// traffic proportions, per-path class mixes, and average passing speeds at
// the three gates (entry, MP_iap, threshold).

namespace tmacap {

struct TrajectoryPoint {
  double timestamp = 0.0;  // unix seconds
  double lat = 0.0;
  double lon = 0.0;
  double ground_speed_kt = 0.0;
};

struct Flight {
  std::string flight_id;
  std::string aircraft_class;
  std::vector<TrajectoryPoint> points;  // strictly increasing timestamps
};

struct GateFix {
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
};

struct PathGates {
  std::string path;
  GateFix entry;
  GateFix mp_iap;
  GateFix thr;
  std::optional<double> capture_radius_nm;  // overrides the set-wide radius
};

struct GateSet {
  std::vector<PathGates> paths;
  double capture_radius_nm = 3.0;

  double radius_for(const PathGates& p) const {
    return p.capture_radius_nm.value_or(capture_radius_nm);
  }
};

double haversine_nm(double lat1, double lon1, double lat2, double lon2);

// Path whose entry fix the flight passes earliest and whose MP_iap and
// threshold fixes it subsequently passes; nullopt when no path's gate
// sequence is satisfied.
std::optional<std::string> assign_path(const Flight& flight, const GateSet& gates);

// Ground speed at the point of closest approach to the fix among points
// within the capture radius; earlier timestamp wins a distance tie. Throws
// std::invalid_argument when the flight never comes within the radius.
double gate_speed(const Flight& flight, const GateFix& fix, double radius_nm);

struct GateSpeedRow {
  std::string path;
  std::string aircraft_class;
  double v_entry_kt = 0.0;
  double v_mpiap_kt = 0.0;
  double v_thr_kt = 0.0;
  std::size_t n_flights = 0;
};

struct PathShare {
  std::string path;
  double proportion = 0.0;
  std::size_t n_flights = 0;
};

struct ClassShare {
  std::string path;
  std::string aircraft_class;
  double proportion = 0.0;
  std::size_t n_flights = 0;
};

struct ExtractionTables {
  std::vector<PathShare> proportions;   // gate-file path order
  std::vector<ClassShare> class_mix;    // path order, then class name order
  std::vector<GateSpeedRow> speeds;
  std::size_t n_matched = 0;
  std::size_t n_unmatched = 0;
};

// Throws std::invalid_argument when no flight matches any path.
ExtractionTables build_tables(const std::vector<Flight>& flights, const GateSet& gates);

// Input CSV columns: flight_id, timestamp_unix_s, lat_deg, lon_deg,
// ground_speed_kt, aircraft_class. Flights keep first-appearance order.
std::vector<Flight> load_points_csv(std::istream& in);
std::vector<Flight> load_points_csv_file(const std::string& path);

GateSet load_gates_json(const std::string& json_text);
GateSet load_gates_file(const std::string& path);

std::string proportions_csv(const ExtractionTables& tables);
std::string class_mix_csv(const ExtractionTables& tables);
std::string speeds_csv(const ExtractionTables& tables);

// Ready-to-edit scenario document in the shape of the extracted tables;
// segment lengths are left at zero for the user to fill in.
std::string scenario_skeleton_json(const ExtractionTables& tables, const std::string& runway);

}  // namespace tmacap
