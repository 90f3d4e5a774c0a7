#include "tmacap/occupancy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tmacap/errors.hpp"
#include "tmacap/format.hpp"
#include "tmacap/kinematics.hpp"

namespace tmacap {

namespace {

struct StreamClass {
  std::size_t path_idx;
  std::size_t class_idx;
  double probability;
  double t_tot;  // entry-to-threshold flight time
};

// Uniform in [0,1) from the top 53 bits; keeps the draw sequence identical
// across standard library implementations.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SimResult simulate(const AirspaceScenario& sc, const PairTable& table, const SimConfig& cfg,
                   std::vector<SimTraceRow>* trace) {
  if (cfg.n_aircraft < 100) {
    throw std::invalid_argument("simulate: n_aircraft must be >= 100");
  }
  if (cfg.warmup_fraction < 0.0 || cfg.warmup_fraction >= 1.0) {
    throw std::invalid_argument("simulate: warmup_fraction must be in [0, 1)");
  }

  std::vector<StreamClass> classes;
  for (std::size_t p : sc.active_paths()) {
    const ArrivalPath& path = sc.paths[p];
    for (std::size_t c = 0; c < path.class_mix.size(); ++c) {
      const ClassMix& mix = path.class_mix[c];
      if (mix.proportion <= 0.0) continue;
      classes.push_back({p, c, path.traffic_proportion * mix.proportion,
                         path_flight_time(path.d_entry_to_mpiap, path.d_mpiap_to_thr,
                                          mix.profile)});
    }
  }
  if (classes.empty()) {
    throw ScenarioError("simulate: scenario has no active traffic");
  }
  double total_prob = 0.0;
  for (const auto& c : classes) total_prob += c.probability;

  // Minimal spacing between a (lead, trail) stream-class pair.
  const std::size_t m = classes.size();
  std::vector<double> delta_t(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const PairTableEntry* e = table.find(classes[a].path_idx, classes[a].class_idx,
                                           classes[b].path_idx, classes[b].class_idx);
      if (e == nullptr) {
        throw SolverError("simulate: pair table is missing combination " +
                          sc.paths[classes[a].path_idx].entry_point + " -> " +
                          sc.paths[classes[b].path_idx].entry_point);
      }
      delta_t[a * m + b] = e->solution.delta_t;
    }
  }

  std::mt19937_64 rng(cfg.rng_seed);
  auto draw = [&]() -> std::size_t {
    const double u = next_uniform(rng) * total_prob;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += classes[i].probability;
      if (u < acc) return i;
    }
    return m - 1;
  };

  const std::size_t n = cfg.n_aircraft;
  std::vector<double> thr_time(n);
  std::vector<double> entry_time(n);
  std::size_t prev = draw();
  thr_time[0] = classes[prev].t_tot;
  entry_time[0] = 0.0;
  double max_t_tot = classes[prev].t_tot;
  if (trace != nullptr) {
    trace->push_back({0.0, thr_time[0], sc.paths[classes[prev].path_idx].entry_point,
                      sc.paths[classes[prev].path_idx].class_mix[classes[prev].class_idx]
                          .aircraft_class});
  }
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t cur = draw();
    thr_time[i] = thr_time[i - 1] + delta_t[prev * m + cur];
    entry_time[i] = thr_time[i] - classes[cur].t_tot;
    max_t_tot = std::max(max_t_tot, classes[cur].t_tot);
    if (trace != nullptr) {
      trace->push_back({entry_time[i], thr_time[i],
                        sc.paths[classes[cur].path_idx].entry_point,
                        sc.paths[classes[cur].path_idx].class_mix[classes[cur].class_idx]
                            .aircraft_class});
    }
    prev = cur;
  }

  // Observation window: drop the warmup head, and stop max_t_tot before the
  // final crossing so the stream is saturated on both sides of every instant.
  const std::size_t w = static_cast<std::size_t>(std::floor(cfg.warmup_fraction *
                                                            static_cast<double>(n)));
  const double win_start = thr_time[w];
  const double win_end = thr_time[n - 1] - max_t_tot;
  if (!(win_end > win_start)) {
    throw std::invalid_argument("simulate: stream too short for the observation window");
  }

  double occupied_time = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::max(entry_time[i], win_start);
    const double hi = std::min(thr_time[i], win_end);
    if (hi > lo) occupied_time += hi - lo;
  }

  // Max and event-mean occupancy: sweep entries (+1) / exits (-1); exits
  // resolve first at equal timestamps (half-open occupancy interval).
  struct Event {
    double t;
    int delta;
  };
  std::vector<Event> events;
  events.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back({entry_time[i], +1});
    events.push_back({thr_time[i], -1});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.delta < b.delta;
  });
  int occupancy = 0;
  int max_occupancy = 0;
  long event_count = 0;
  long occupancy_sum = 0;
  for (const Event& ev : events) {
    occupancy += ev.delta;
    if (ev.t >= win_start && ev.t < win_end) {
      max_occupancy = std::max(max_occupancy, occupancy);
      occupancy_sum += occupancy;
      ++event_count;
    }
  }

  SimResult result;
  result.rng_seed = cfg.rng_seed;
  result.n_aircraft = n;
  result.time_avg_occupancy = occupied_time / (win_end - win_start);
  result.max_occupancy = max_occupancy;
  result.mean_occupancy =
      event_count > 0 ? static_cast<double>(occupancy_sum) / static_cast<double>(event_count)
                      : 0.0;
  result.realized_mean_thr_spacing =
      (thr_time[n - 1] - thr_time[w]) / static_cast<double>(n - 1 - w);
  return result;
}

std::string sim_result_json(const SimResult& r) {
  nlohmann::json j;
  j["mean_occupancy"] = round_sig(r.mean_occupancy);
  j["max_occupancy"] = r.max_occupancy;
  j["time_avg_occupancy"] = round_sig(r.time_avg_occupancy);
  j["realized_mean_thr_spacing_min"] = round_sig(r.realized_mean_thr_spacing);
  j["rng_seed"] = r.rng_seed;
  j["n_aircraft"] = r.n_aircraft;
  return j.dump(2) + "\n";
}

std::string sim_trace_csv(const std::vector<SimTraceRow>& trace) {
  std::ostringstream out;
  out << "entry_time,thr_time,path,class\n";
  for (const auto& row : trace) {
    out << format_sig(row.entry_time) << ',' << format_sig(row.thr_time) << ',' << row.path
        << ',' << row.aircraft_class << '\n';
  }
  return out.str();
}

}  // namespace tmacap
