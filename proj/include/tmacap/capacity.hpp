#pragma once

#include <string>
#include <vector>

#include "tmacap/pairwise_separation.hpp"
#include "tmacap/scenario.hpp"

// Aggregates pairwise solutions and path statistics into the headline
// quantities: temporal flight distance D_temp, average time separation at the
// threshold, and the occupancy-count capacity lambda = D_temp / T_thr.

namespace tmacap {

struct PathMeanTime {
  std::string entry_point;
  double mean_time_min = 0.0;
};

struct CapacityReport {
  std::string runway_id;
  double d_temp_min = 0.0;
  double t_bar_thr_min = 0.0;
  double lambda = 0.0;  // fractional occupancy count
  std::vector<PathMeanTime> per_path_mean_times;
  PairTable pair_table;
};

// Class-proportion-weighted flight time of one path.
double path_mean_time(const ArrivalPath& path);

// Literal evaluation of the sorted/telescoped double sum, cross-checked
// against the weighted mean of per-path times; disagreement beyond 1e-9 is an
// internal error.
double temporal_flight_distance(const AirspaceScenario& scenario);

// Probability-weighted mean of the pairwise minimal threshold-crossing time
// differences. Throws on a missing combination.
double average_time_separation(const AirspaceScenario& scenario, const PairTable& pair_table);

CapacityReport capacity(const AirspaceScenario& scenario);

std::string capacity_report_csv(const CapacityReport& report);
std::string capacity_report_json(const CapacityReport& report, bool include_floor = false);
std::string capacity_report_table(const CapacityReport& report, bool include_floor = false);

}  // namespace tmacap
