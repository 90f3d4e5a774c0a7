#include "tmacap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tmacap/errors.hpp"
#include "tmacap/format.hpp"
#include "tmacap/kinematics.hpp"

namespace tmacap {

double path_mean_time(const ArrivalPath& path) {
  double t = 0.0;
  for (const auto& c : path.class_mix) {
    if (c.proportion <= 0.0) continue;
    t += c.proportion * path_flight_time(path.d_entry_to_mpiap, path.d_mpiap_to_thr, c.profile);
  }
  return t;
}

double temporal_flight_distance(const AirspaceScenario& sc) {
  const auto active = sc.active_paths();
  if (active.empty()) {
    throw ScenarioError("temporal_flight_distance: no active paths");
  }

  struct Row {
    double rho;
    double t_tot;
    const std::string* entry;
  };
  std::vector<Row> rows;
  rows.reserve(active.size());
  for (std::size_t idx : active) {
    rows.push_back({sc.paths[idx].traffic_proportion, path_mean_time(sc.paths[idx]),
                    &sc.paths[idx].entry_point});
  }
  // Ascending by mean flight time; ties resolved by entry label only to keep
  // intermediate reporting stable (the telescoped sum is tie-independent).
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.t_tot != b.t_tot) return a.t_tot < b.t_tot;
    return *a.entry < *b.entry;
  });

  double first_term = 0.0;
  for (const auto& r : rows) first_term += r.rho * rows.front().t_tot;
  double second_term = 0.0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    double tail_rho = 0.0;
    for (std::size_t i = r; i < rows.size(); ++i) tail_rho += rows[i].rho;
    second_term += tail_rho * (rows[r].t_tot - rows[r - 1].t_tot);
  }
  const double d_temp = first_term + second_term;

  double weighted_mean = 0.0;
  for (const auto& r : rows) weighted_mean += r.rho * r.t_tot;
  if (std::fabs(d_temp - weighted_mean) > 1e-9) {
    throw std::logic_error("temporal_flight_distance: telescoped sum " + format_sig(d_temp, 17) +
                           " != weighted mean " + format_sig(weighted_mean, 17));
  }
  return d_temp;
}

double average_time_separation(const AirspaceScenario& sc, const PairTable& table) {
  double weight_sum = 0.0;
  double weighted_delta = 0.0;
  const auto active = sc.active_paths();
  for (std::size_t k : active) {
    for (std::size_t i = 0; i < sc.paths[k].class_mix.size(); ++i) {
      if (sc.paths[k].class_mix[i].proportion <= 0.0) continue;
      for (std::size_t l : active) {
        for (std::size_t j = 0; j < sc.paths[l].class_mix.size(); ++j) {
          if (sc.paths[l].class_mix[j].proportion <= 0.0) continue;
          const PairTableEntry* e = table.find(k, i, l, j);
          if (e == nullptr) {
            throw SolverError("average_time_separation: missing combination " +
                              sc.paths[k].class_mix[i].aircraft_class + "/" +
                              sc.paths[k].entry_point + " -> " +
                              sc.paths[l].class_mix[j].aircraft_class + "/" +
                              sc.paths[l].entry_point);
          }
          weight_sum += e->probability;
          weighted_delta += e->probability * e->solution.delta_t;
        }
      }
    }
  }
  if (std::fabs(weight_sum - 1.0) > 1e-9) {
    throw std::logic_error("average_time_separation: combination weights sum to " +
                           format_sig(weight_sum, 17));
  }
  return weighted_delta / weight_sum;
}

CapacityReport capacity(const AirspaceScenario& sc) {
  CapacityReport report;
  report.runway_id = sc.runway_id;
  report.pair_table = solve_all_pairs(sc);
  report.d_temp_min = temporal_flight_distance(sc);
  report.t_bar_thr_min = average_time_separation(sc, report.pair_table);
  report.lambda = report.d_temp_min / report.t_bar_thr_min;
  for (std::size_t idx : sc.active_paths()) {
    report.per_path_mean_times.push_back(
        {sc.paths[idx].entry_point, path_mean_time(sc.paths[idx])});
  }
  return report;
}

std::string capacity_report_csv(const CapacityReport& r) {
  std::ostringstream out;
  out << "runway,d_temp_min,t_bar_thr_min,lambda\n";
  out << r.runway_id << ',' << format_sig(r.d_temp_min) << ',' << format_sig(r.t_bar_thr_min)
      << ',' << format_sig(r.lambda) << '\n';
  return out.str();
}

std::string capacity_report_json(const CapacityReport& r, bool include_floor) {
  nlohmann::json j;
  j["runway"] = r.runway_id;
  j["d_temp_min"] = round_sig(r.d_temp_min);
  j["t_bar_thr_min"] = round_sig(r.t_bar_thr_min);
  j["lambda"] = round_sig(r.lambda);
  if (include_floor) j["lambda_floor"] = std::floor(r.lambda);
  nlohmann::json per_path = nlohmann::json::array();
  for (const auto& p : r.per_path_mean_times) {
    per_path.push_back({{"path", p.entry_point}, {"mean_time_min", round_sig(p.mean_time_min)}});
  }
  j["per_path_mean_times"] = per_path;
  return j.dump(2) + "\n";
}

std::string capacity_report_table(const CapacityReport& r, bool include_floor) {
  // Human mode mirrors 2-decimal minutes and 1-decimal occupancy counts.
  std::ostringstream out;
  char buf[128];
  out << "runway      d_temp_min  t_bar_thr_min  lambda\n";
  std::snprintf(buf, sizeof(buf), "%-11s %-11.2f %-14.2f %.1f", r.runway_id.c_str(),
                r.d_temp_min, r.t_bar_thr_min, r.lambda);
  out << buf;
  if (include_floor) {
    std::snprintf(buf, sizeof(buf), "  (floor %d)", static_cast<int>(std::floor(r.lambda)));
    out << buf;
  }
  out << '\n';
  return out.str();
}

}  // namespace tmacap
