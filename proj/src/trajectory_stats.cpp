#include "tmacap/trajectory_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tmacap/errors.hpp"
#include "tmacap/format.hpp"

namespace tmacap {

namespace {

constexpr double kEarthRadiusNm = 3440.065;
constexpr double kDeg2Rad = M_PI / 180.0;

// Index of the closest-approach point to the fix within the radius, searching
// points[from..]; earlier timestamp wins ties. -1 when no passage.
long closest_within(const std::vector<TrajectoryPoint>& points, std::size_t from,
                    const GateFix& fix, double radius_nm) {
  long best = -1;
  double best_dist = radius_nm;
  for (std::size_t i = from; i < points.size(); ++i) {
    const double d = haversine_nm(points[i].lat, points[i].lon, fix.lat, fix.lon);
    if (d < best_dist || (best < 0 && d <= radius_nm)) {
      best_dist = d;
      best = static_cast<long>(i);
    }
  }
  return best;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

double haversine_nm(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDeg2Rad;
  const double p2 = lat2 * kDeg2Rad;
  const double dp = (lat2 - lat1) * kDeg2Rad;
  const double dl = (lon2 - lon1) * kDeg2Rad;
  const double a = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusNm * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

std::optional<std::string> assign_path(const Flight& flight, const GateSet& gates) {
  if (flight.points.size() < 2) return std::nullopt;

  const std::string* best_path = nullptr;
  double best_entry_time = 0.0;
  for (const PathGates& pg : gates.paths) {
    const double radius = gates.radius_for(pg);
    const long e = closest_within(flight.points, 0, pg.entry, radius);
    if (e < 0) continue;
    const long m = closest_within(flight.points, static_cast<std::size_t>(e) + 1, pg.mp_iap,
                                  radius);
    if (m < 0) continue;
    const long t = closest_within(flight.points, static_cast<std::size_t>(m) + 1, pg.thr,
                                  radius);
    if (t < 0) continue;
    const double entry_time = flight.points[static_cast<std::size_t>(e)].timestamp;
    if (best_path == nullptr || entry_time < best_entry_time) {
      best_path = &pg.path;
      best_entry_time = entry_time;
    }
  }
  if (best_path == nullptr) return std::nullopt;
  return *best_path;
}

double gate_speed(const Flight& flight, const GateFix& fix, double radius_nm) {
  const long idx = closest_within(flight.points, 0, fix, radius_nm);
  if (idx < 0) {
    throw std::invalid_argument("gate_speed: flight " + flight.flight_id + " never passes within " +
                                format_sig(radius_nm) + " NM of " + fix.name);
  }
  return flight.points[static_cast<std::size_t>(idx)].ground_speed_kt;
}

ExtractionTables build_tables(const std::vector<Flight>& flights, const GateSet& gates) {
  ExtractionTables tables;

  struct Accum {
    std::size_t count = 0;
    double v_entry = 0.0;
    double v_mpiap = 0.0;
    double v_thr = 0.0;
  };
  // path index -> class name -> accumulated speeds
  std::vector<std::map<std::string, Accum>> per_path(gates.paths.size());
  std::vector<std::size_t> per_path_count(gates.paths.size(), 0);

  for (const Flight& flight : flights) {
    const auto path = assign_path(flight, gates);
    if (!path) {
      ++tables.n_unmatched;
      continue;
    }
    ++tables.n_matched;
    for (std::size_t p = 0; p < gates.paths.size(); ++p) {
      if (gates.paths[p].path != *path) continue;
      const double radius = gates.radius_for(gates.paths[p]);
      Accum& acc = per_path[p][flight.aircraft_class];
      ++acc.count;
      acc.v_entry += gate_speed(flight, gates.paths[p].entry, radius);
      acc.v_mpiap += gate_speed(flight, gates.paths[p].mp_iap, radius);
      acc.v_thr += gate_speed(flight, gates.paths[p].thr, radius);
      ++per_path_count[p];
      break;
    }
  }
  if (tables.n_matched == 0) {
    throw std::invalid_argument("build_tables: no flight matched any path");
  }

  for (std::size_t p = 0; p < gates.paths.size(); ++p) {
    tables.proportions.push_back(
        {gates.paths[p].path,
         static_cast<double>(per_path_count[p]) / static_cast<double>(tables.n_matched),
         per_path_count[p]});
    for (const auto& [cls, acc] : per_path[p]) {
      const double n = static_cast<double>(acc.count);
      tables.class_mix.push_back(
          {gates.paths[p].path, cls, n / static_cast<double>(per_path_count[p]), acc.count});
      tables.speeds.push_back({gates.paths[p].path, cls, acc.v_entry / n, acc.v_mpiap / n,
                               acc.v_thr / n, acc.count});
    }
  }
  return tables;
}

std::vector<Flight> load_points_csv(std::istream& in) {
  std::vector<Flight> flights;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("flight_id", 0) == 0) continue;  // header
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw std::invalid_argument("points csv line " + std::to_string(line_no) +
                                  ": expected 6 columns, got " + std::to_string(f.size()));
    }
    TrajectoryPoint pt;
    try {
      pt.timestamp = std::stod(f[1]);
      pt.lat = std::stod(f[2]);
      pt.lon = std::stod(f[3]);
      pt.ground_speed_kt = std::stod(f[4]);
    } catch (const std::exception&) {
      throw std::invalid_argument("points csv line " + std::to_string(line_no) +
                                  ": numeric field failed to parse");
    }
    if (!(pt.ground_speed_kt > 0.0)) {
      throw std::invalid_argument("points csv line " + std::to_string(line_no) +
                                  ": ground speed must be positive");
    }
    auto it = index.find(f[0]);
    if (it == index.end()) {
      index.emplace(f[0], flights.size());
      flights.push_back({f[0], f[5], {pt}});
    } else {
      Flight& fl = flights[it->second];
      if (pt.timestamp <= fl.points.back().timestamp) {
        throw std::invalid_argument("points csv line " + std::to_string(line_no) +
                                    ": timestamps must be strictly increasing per flight");
      }
      fl.points.push_back(pt);
    }
  }
  return flights;
}

std::vector<Flight> load_points_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open points csv " + path);
  return load_points_csv(in);
}

GateSet load_gates_json(const std::string& json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("gates: parse error: ") + e.what());
  }
  GateSet gates;
  if (root.contains("capture_radius_nm")) {
    gates.capture_radius_nm = root["capture_radius_nm"].get<double>();
  }
  if (!(gates.capture_radius_nm > 0.0)) {
    throw ScenarioError("gates: capture radius must be > 0");
  }
  if (!root.contains("paths") || !root["paths"].is_array() || root["paths"].empty()) {
    throw ScenarioError("gates: 'paths' must be a non-empty array");
  }
  auto fix_from = [](const nlohmann::json& j, const std::string& name) {
    if (!j.contains("lat") || !j.contains("lon")) {
      throw ScenarioError("gates: fix '" + name + "' needs lat and lon");
    }
    return GateFix{name, j["lat"].get<double>(), j["lon"].get<double>()};
  };
  for (const auto& jp : root["paths"]) {
    PathGates pg;
    pg.path = jp.at("path").get<std::string>();
    pg.entry = fix_from(jp.at("entry"), pg.path + ":entry");
    pg.mp_iap = fix_from(jp.at("mp_iap"), pg.path + ":mp_iap");
    pg.thr = fix_from(jp.at("thr"), pg.path + ":thr");
    if (jp.contains("capture_radius_nm")) {
      pg.capture_radius_nm = jp["capture_radius_nm"].get<double>();
    }
    gates.paths.push_back(std::move(pg));
  }
  return gates;
}

GateSet load_gates_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open gates file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_gates_json(buf.str());
}

std::string proportions_csv(const ExtractionTables& t) {
  std::ostringstream out;
  out << "path,n_flights,proportion\n";
  for (const auto& row : t.proportions) {
    out << row.path << ',' << row.n_flights << ',' << format_sig(row.proportion) << '\n';
  }
  return out.str();
}

std::string class_mix_csv(const ExtractionTables& t) {
  std::ostringstream out;
  out << "path,class,n_flights,proportion\n";
  for (const auto& row : t.class_mix) {
    out << row.path << ',' << row.aircraft_class << ',' << row.n_flights << ','
        << format_sig(row.proportion) << '\n';
  }
  return out.str();
}

std::string speeds_csv(const ExtractionTables& t) {
  std::ostringstream out;
  out << "path,class,n_flights,v_entry_kt,v_mpiap_kt,v_thr_kt\n";
  for (const auto& row : t.speeds) {
    out << row.path << ',' << row.aircraft_class << ',' << row.n_flights << ','
        << format_sig(row.v_entry_kt) << ',' << format_sig(row.v_mpiap_kt) << ','
        << format_sig(row.v_thr_kt) << '\n';
  }
  return out.str();
}

std::string scenario_skeleton_json(const ExtractionTables& t, const std::string& runway) {
  nlohmann::json root;
  root["name"] = "extracted scenario (fill in path lengths)";
  root["runway"] = runway;
  root["notes"] = "generated by extract; d_entry_mpiap_nm and d_mpiap_thr_nm must be "
                  "measured from the procedure charts before use";
  root["separation"] = {{"s_tma_nm", 5.0}, {"s_thr_nm", 8.0}};
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& share : t.proportions) {
    nlohmann::json jp;
    jp["entry"] = share.path;
    jp["proportion"] = round_sig(share.proportion);
    jp["d_entry_mpiap_nm"] = 0.0;
    jp["d_mpiap_thr_nm"] = 0.0;
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& mix : t.class_mix) {
      if (mix.path != share.path) continue;
      for (const auto& spd : t.speeds) {
        if (spd.path != mix.path || spd.aircraft_class != mix.aircraft_class) continue;
        classes.push_back({{"class", mix.aircraft_class},
                           {"proportion", round_sig(mix.proportion)},
                           {"v_entry_kt", round_sig(spd.v_entry_kt)},
                           {"v_mpiap_kt", round_sig(spd.v_mpiap_kt)},
                           {"v_thr_kt", round_sig(spd.v_thr_kt)}});
      }
    }
    jp["classes"] = classes;
    paths.push_back(std::move(jp));
  }
  root["paths"] = paths;
  root["pair_geometry"] = nlohmann::json::array();
  return root.dump(2) + "\n";
}

}  // namespace tmacap
