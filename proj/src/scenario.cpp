#include "tmacap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tmacap/errors.hpp"
#include "tmacap/units.hpp"

namespace tmacap {

using nlohmann::json;

namespace {

constexpr double kSumTol = 1e-9;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

const json& require_field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ScenarioError("scenario: missing field '" + std::string(key) + "' in " + where);
  }
  return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_number()) {
    throw ScenarioError("scenario: field '" + std::string(key) + "' in " + where +
                        " must be a number");
  }
  return v.get<double>();
}

std::string require_string(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_string()) {
    throw ScenarioError("scenario: field '" + std::string(key) + "' in " + where +
                        " must be a string");
  }
  return v.get<std::string>();
}

// Longest shared waypoint suffix of two polylines; returns the first fix of
// the shared suffix (MP_kl) or nullopt when the polylines share nothing.
std::optional<std::string> shared_suffix_start(const std::vector<PathWaypoint>& a,
                                               const std::vector<PathWaypoint>& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() &&
         a[a.size() - 1 - n].fix == b[b.size() - 1 - n].fix) {
    ++n;
  }
  if (n == 0) return std::nullopt;
  return a[a.size() - n].fix;
}

double cum_dist_at(const std::vector<PathWaypoint>& wps, const std::string& fix,
                   const std::string& path_label) {
  for (const auto& w : wps) {
    if (w.fix == fix) return w.cum_dist_nm;
  }
  throw ScenarioError("scenario: waypoint '" + fix + "' not found on path " + path_label);
}

}  // namespace

const ClassMix* ArrivalPath::find_class(const std::string& name) const {
  for (const auto& c : class_mix) {
    if (c.aircraft_class == name) return &c;
  }
  return nullptr;
}

double SeparationPolicy::s_for(const std::string& lead_class,
                               const std::string& trail_class) const {
  auto it = s_class.find({lead_class, trail_class});
  return it != s_class.end() ? it->second : s_tma;
}

const PairGeometry& AirspaceScenario::geometry(std::size_t a, std::size_t b) const {
  auto it = pair_geometry.find({std::min(a, b), std::max(a, b)});
  if (it == pair_geometry.end()) {
    throw ScenarioError("scenario: no pair geometry for paths " + paths.at(a).entry_point +
                        "/" + paths.at(b).entry_point);
  }
  return it->second;
}

std::vector<std::size_t> AirspaceScenario::active_paths() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].traffic_proportion > 0.0) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> AirspaceScenario::path_index(const std::string& entry_point) const {
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].entry_point == entry_point) return i;
  }
  return std::nullopt;
}

std::vector<Violation> validate(const AirspaceScenario& sc) {
  std::vector<Violation> v;
  auto flag = [&v](std::string entity, std::string message) {
    v.push_back({std::move(entity), std::move(message)});
  };

  if (sc.paths.empty()) {
    flag("scenario", "no arrival paths defined");
    return v;
  }

  double prop_sum = 0.0;
  for (std::size_t i = 0; i < sc.paths.size(); ++i) {
    const ArrivalPath& p = sc.paths[i];
    const std::string ent = "path " + p.entry_point;
    prop_sum += p.traffic_proportion;
    if (p.traffic_proportion < 0.0) flag(ent, "negative traffic proportion");
    if (!(p.d_entry_to_mpiap > 0.0)) flag(ent, "d_entry_mpiap must be > 0");
    if (!(p.d_mpiap_to_thr > 0.0)) flag(ent, "d_mpiap_thr must be > 0");
    for (std::size_t k = i + 1; k < sc.paths.size(); ++k) {
      if (sc.paths[k].entry_point == p.entry_point) {
        flag(ent, "duplicate entry point label");
      }
    }
    if (p.class_mix.empty()) {
      flag(ent, "no aircraft classes");
      continue;
    }
    double mix_sum = 0.0;
    for (const auto& c : p.class_mix) {
      const std::string cent = ent + " class " + c.aircraft_class;
      mix_sum += c.proportion;
      if (c.proportion < 0.0) flag(cent, "negative class proportion");
      const SpeedProfile& sp = c.profile;
      if (!(sp.v_thr > 0.0) || !(sp.v_mpiap > 0.0) || !(sp.v_entry > 0.0)) {
        flag(cent, "speeds must be strictly positive");
      } else {
        if (sp.v_entry < sp.v_mpiap) {
          flag(cent, "accelerating segment entry->MP_iap on path " + p.entry_point);
        }
        if (sp.v_mpiap < sp.v_thr) {
          flag(cent, "accelerating segment MP_iap->THR on path " + p.entry_point);
        }
      }
    }
    if (std::fabs(mix_sum - 1.0) > kSumTol) {
      flag(ent, "class mix sums to " + fmt(mix_sum));
    }
  }
  if (std::fabs(prop_sum - 1.0) > kSumTol) {
    flag("scenario", "proportions sum to " + fmt(prop_sum));
  }

  // One runway: all paths converge at MP_iap and share the final segment.
  const double d2 = sc.paths.front().d_mpiap_to_thr;
  for (const auto& p : sc.paths) {
    if (std::fabs(p.d_mpiap_to_thr - d2) > kSumTol) {
      flag("path " + p.entry_point,
           "d_mpiap_thr " + fmt(p.d_mpiap_to_thr) + " differs from shared value " + fmt(d2));
    }
  }

  if (!(sc.separation.s_tma > 0.0)) flag("separation", "s_tma must be > 0");
  if (sc.separation.allow_sthr_below_s) {
    if (!(sc.separation.s_thr > 0.0)) flag("separation", "s_thr must be > 0");
  } else if (sc.separation.s_thr < sc.separation.s_tma) {
    flag("separation", "s_thr " + fmt(sc.separation.s_thr) + " below s_tma " +
                           fmt(sc.separation.s_tma) + " (set allow_sthr_below_s to permit)");
  }
  for (const auto& [key, s] : sc.separation.s_class) {
    if (!(s > 0.0)) {
      flag("separation " + key.first + "/" + key.second, "class-pair S must be > 0");
    }
  }

  for (std::size_t a = 0; a < sc.paths.size(); ++a) {
    for (std::size_t b = a; b < sc.paths.size(); ++b) {
      const std::string ent =
          "pair (" + sc.paths[a].entry_point + ", " + sc.paths[b].entry_point + ")";
      auto it = sc.pair_geometry.find({a, b});
      if (it == sc.pair_geometry.end()) {
        flag(ent, "missing pair geometry");
        continue;
      }
      const PairGeometry& g = it->second;
      if (g.d_common1 < 0.0) flag(ent, "d_common1 must be >= 0");
      if (std::fabs(g.d_common2 - sc.paths[a].d_mpiap_to_thr) > kSumTol) {
        flag(ent, "d_common2 must equal d_mpiap_thr");
      }
      if (a == b && std::fabs(g.d_common1 - sc.paths[a].d_entry_to_mpiap) > kSumTol) {
        flag(ent, "same-path pair must have d_common1 equal to entry->MP_iap length");
      }
      if (std::fabs(g.d_entry_to_mpkl_a + g.d_common1 - sc.paths[a].d_entry_to_mpiap) >
          kSumTol) {
        flag(ent, "geometry inconsistency: d_entry_to_mpkl + d_common1 != d_entry_mpiap for " +
                      sc.paths[a].entry_point);
      }
      if (std::fabs(g.d_entry_to_mpkl_b + g.d_common1 - sc.paths[b].d_entry_to_mpiap) >
          kSumTol) {
        flag(ent, "geometry inconsistency: d_entry_to_mpkl + d_common1 != d_entry_mpiap for " +
                      sc.paths[b].entry_point);
      }
      if (g.d_entry_to_mpkl_a < -kSumTol || g.d_entry_to_mpkl_b < -kSumTol) {
        flag(ent, "d_common1 exceeds a path's entry->MP_iap length");
      }
    }
  }

  // Polyline cross-check when both paths carry waypoints.
  for (const auto& p : sc.paths) {
    for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
      if (p.waypoints[i].cum_dist_nm < p.waypoints[i - 1].cum_dist_nm) {
        flag("path " + p.entry_point, "waypoint cumulative distances must be non-decreasing");
      }
    }
  }

  return v;
}

namespace {

AirspaceScenario scenario_from_json(const json& root) {
  AirspaceScenario sc;
  sc.name = require_string(root, "name", "document root");
  sc.runway_id = require_string(root, "runway", "document root");
  if (root.contains("notes") && root["notes"].is_string()) {
    sc.notes = root["notes"].get<std::string>();
  }

  const json& sep = require_field(root, "separation", "document root");
  sc.separation.s_tma = require_number(sep, "s_tma_nm", "separation");
  sc.separation.s_thr = require_number(sep, "s_thr_nm", "separation");
  sc.separation.allow_sthr_below_s = sep.value("allow_sthr_below_s", false);
  if (sep.contains("s_class_nm")) {
    for (const auto& row : sep["s_class_nm"]) {
      sc.separation.s_class[{require_string(row, "lead_class", "s_class_nm"),
                             require_string(row, "trail_class", "s_class_nm")}] =
          require_number(row, "s_nm", "s_class_nm");
    }
  }

  const json& paths = require_field(root, "paths", "document root");
  if (!paths.is_array() || paths.empty()) {
    throw ScenarioError("scenario: 'paths' must be a non-empty array");
  }
  for (const auto& jp : paths) {
    ArrivalPath p;
    p.entry_point = require_string(jp, "entry", "paths[]");
    const std::string where = "path " + p.entry_point;
    p.traffic_proportion = require_number(jp, "proportion", where);
    p.d_entry_to_mpiap = require_number(jp, "d_entry_mpiap_nm", where);
    p.d_mpiap_to_thr = require_number(jp, "d_mpiap_thr_nm", where);
    const json& classes = require_field(jp, "classes", where);
    for (const auto& jc : classes) {
      ClassMix c;
      c.aircraft_class = require_string(jc, "class", where);
      c.proportion = require_number(jc, "proportion", where + " classes[]");
      c.profile.v_entry = kt_to_nm_per_min(require_number(jc, "v_entry_kt", where));
      c.profile.v_mpiap = kt_to_nm_per_min(require_number(jc, "v_mpiap_kt", where));
      c.profile.v_thr = kt_to_nm_per_min(require_number(jc, "v_thr_kt", where));
      p.class_mix.push_back(std::move(c));
    }
    if (jp.contains("waypoints")) {
      for (const auto& jw : jp["waypoints"]) {
        p.waypoints.push_back({require_string(jw, "fix", where + " waypoints[]"),
                               require_number(jw, "cum_dist_nm", where + " waypoints[]")});
      }
    }
    sc.paths.push_back(std::move(p));
  }

  // Explicit pair-geometry entries are authoritative; polyline-derived values
  // fill the gaps; anything still missing merges at MP_iap (d_common1 = 0).
  std::map<std::pair<std::size_t, std::size_t>, double> dcom1;
  if (root.contains("pair_geometry")) {
    for (const auto& jg : root["pair_geometry"]) {
      const std::string pa = require_string(jg, "path_a", "pair_geometry[]");
      const std::string pb = require_string(jg, "path_b", "pair_geometry[]");
      auto ia = sc.path_index(pa);
      auto ib = sc.path_index(pb);
      if (!ia || !ib) {
        throw ScenarioError("scenario: pair_geometry references unknown path '" +
                            (!ia ? pa : pb) + "'");
      }
      dcom1[{std::min(*ia, *ib), std::max(*ia, *ib)}] =
          require_number(jg, "d_common1_nm", "pair_geometry " + pa + "/" + pb);
    }
  }

  for (std::size_t a = 0; a < sc.paths.size(); ++a) {
    for (std::size_t b = a; b < sc.paths.size(); ++b) {
      PairGeometry g;
      g.d_common2 = sc.paths[a].d_mpiap_to_thr;
      if (a == b) {
        // MP_kk is the entry point of the path.
        g.d_common1 = sc.paths[a].d_entry_to_mpiap;
      } else if (auto it = dcom1.find({a, b}); it != dcom1.end()) {
        g.d_common1 = it->second;
      } else if (!sc.paths[a].waypoints.empty() && !sc.paths[b].waypoints.empty()) {
        auto mpkl = shared_suffix_start(sc.paths[a].waypoints, sc.paths[b].waypoints);
        if (mpkl) {
          const double from_a = sc.paths[a].d_entry_to_mpiap -
                                cum_dist_at(sc.paths[a].waypoints, *mpkl, sc.paths[a].entry_point);
          const double from_b = sc.paths[b].d_entry_to_mpiap -
                                cum_dist_at(sc.paths[b].waypoints, *mpkl, sc.paths[b].entry_point);
          if (std::fabs(from_a - from_b) > 1e-6) {
            throw ScenarioError("scenario: polylines of " + sc.paths[a].entry_point + " and " +
                                sc.paths[b].entry_point +
                                " disagree on the common-path length (" + fmt(from_a) + " vs " +
                                fmt(from_b) + ")");
          }
          g.d_common1 = std::max(0.0, from_a);
        }
      }
      g.d_entry_to_mpkl_a = sc.paths[a].d_entry_to_mpiap - g.d_common1;
      g.d_entry_to_mpkl_b = sc.paths[b].d_entry_to_mpiap - g.d_common1;
      sc.pair_geometry[{a, b}] = g;
    }
  }

  return sc;
}

}  // namespace

AirspaceScenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario: parse error: ") + e.what());
  }
  return scenario_from_json(root);
}

AirspaceScenario load_scenario(const std::string& json_text) {
  AirspaceScenario sc = parse_scenario(json_text);
  const auto violations = validate(sc);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "scenario invalid (" << violations.size() << " violation"
        << (violations.size() == 1 ? "" : "s") << "):";
    for (const auto& v : violations) msg << "\n  " << v.entity << ": " << v.message;
    throw ScenarioError(msg.str());
  }
  return sc;
}

AirspaceScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario: cannot open file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string serialize_scenario(const AirspaceScenario& sc) {
  json root;
  root["name"] = sc.name;
  root["runway"] = sc.runway_id;
  if (!sc.notes.empty()) root["notes"] = sc.notes;

  json sep;
  sep["s_tma_nm"] = sc.separation.s_tma;
  sep["s_thr_nm"] = sc.separation.s_thr;
  if (sc.separation.allow_sthr_below_s) sep["allow_sthr_below_s"] = true;
  if (!sc.separation.s_class.empty()) {
    json rows = json::array();
    for (const auto& [key, s] : sc.separation.s_class) {
      rows.push_back({{"lead_class", key.first}, {"trail_class", key.second}, {"s_nm", s}});
    }
    sep["s_class_nm"] = rows;
  }
  root["separation"] = sep;

  json paths = json::array();
  for (const auto& p : sc.paths) {
    json jp;
    jp["entry"] = p.entry_point;
    jp["proportion"] = p.traffic_proportion;
    jp["d_entry_mpiap_nm"] = p.d_entry_to_mpiap;
    jp["d_mpiap_thr_nm"] = p.d_mpiap_to_thr;
    json classes = json::array();
    for (const auto& c : p.class_mix) {
      classes.push_back({{"class", c.aircraft_class},
                         {"proportion", c.proportion},
                         {"v_entry_kt", nm_per_min_to_kt(c.profile.v_entry)},
                         {"v_mpiap_kt", nm_per_min_to_kt(c.profile.v_mpiap)},
                         {"v_thr_kt", nm_per_min_to_kt(c.profile.v_thr)}});
    }
    jp["classes"] = classes;
    if (!p.waypoints.empty()) {
      json wps = json::array();
      for (const auto& w : p.waypoints) {
        wps.push_back({{"fix", w.fix}, {"cum_dist_nm", w.cum_dist_nm}});
      }
      jp["waypoints"] = wps;
    }
    paths.push_back(std::move(jp));
  }
  root["paths"] = paths;

  json geom = json::array();
  for (const auto& [key, g] : sc.pair_geometry) {
    if (key.first == key.second) continue;  // implied by the entry point rule
    geom.push_back({{"path_a", sc.paths[key.first].entry_point},
                    {"path_b", sc.paths[key.second].entry_point},
                    {"d_common1_nm", g.d_common1}});
  }
  root["pair_geometry"] = geom;

  return root.dump(2) + "\n";
}

}  // namespace tmacap
