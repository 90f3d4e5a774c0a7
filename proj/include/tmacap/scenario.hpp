#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Structural-space description of one runway's TMA: arrival paths, merge
// topology, per-class speed profiles, traffic proportions and the ATC
// separation policy. Scenarios are immutable after load and safe to share
// across threads.

namespace tmacap {

// Speeds in NM/min, monotone non-increasing entry -> MP_iap -> threshold.
struct SpeedProfile {
  double v_entry = 0.0;
  double v_mpiap = 0.0;
  double v_thr = 0.0;
};

struct ClassMix {
  std::string aircraft_class;
  double proportion = 0.0;  // p_c, sums to 1 over the classes of a path
  SpeedProfile profile;
};

// Optional polyline description: ordered fixes with cumulative along-path
// distance from the entry point. Used only to derive pair geometry when the
// explicit table omits a pair.
struct PathWaypoint {
  std::string fix;
  double cum_dist_nm = 0.0;
};

struct ArrivalPath {
  std::string entry_point;
  double traffic_proportion = 0.0;  // rho_r; 0 keeps the path out of all sums
  double d_entry_to_mpiap = 0.0;    // NM
  double d_mpiap_to_thr = 0.0;      // NM
  std::vector<ClassMix> class_mix;
  std::vector<PathWaypoint> waypoints;  // optional

  const ClassMix* find_class(const std::string& name) const;
};

// Common-path decomposition for an unordered path pair. d_entry_to_mpkl_a/_b
// follow the key order (a = lower path index).
struct PairGeometry {
  double d_common1 = 0.0;         // MP_kl -> MP_iap, 0 iff MP_kl = MP_iap
  double d_common2 = 0.0;         // MP_iap -> THR
  double d_entry_to_mpkl_a = 0.0;
  double d_entry_to_mpkl_b = 0.0;
};

struct SeparationPolicy {
  double s_tma = 0.0;  // S, NM
  double s_thr = 0.0;  // S_thr, NM
  bool allow_sthr_below_s = false;
  // Optional per-class-pair override of S, keyed (lead class, trail class).
  std::map<std::pair<std::string, std::string>, double> s_class;

  double s_for(const std::string& lead_class, const std::string& trail_class) const;
};

struct AirspaceScenario {
  std::string name;
  std::string runway_id;
  std::string notes;
  std::vector<ArrivalPath> paths;
  SeparationPolicy separation;
  // Keyed by unordered path-index pair (min, max); every pair present.
  std::map<std::pair<std::size_t, std::size_t>, PairGeometry> pair_geometry;

  const PairGeometry& geometry(std::size_t a, std::size_t b) const;
  // Indices of paths with nonzero traffic proportion, in file order.
  std::vector<std::size_t> active_paths() const;
  std::optional<std::size_t> path_index(const std::string& entry_point) const;
};

struct Violation {
  std::string entity;   // offending path/class/pair
  std::string message;
};

// Schema-only parse: structure and field types enforced, invariants left to
// validate(). Throws ScenarioError on malformed documents.
AirspaceScenario parse_scenario(const std::string& json_text);

// Parse and validate. Throws ScenarioError on schema or invariant failure,
// naming the offending field. The returned scenario always passes validate().
AirspaceScenario load_scenario(const std::string& json_text);
AirspaceScenario load_scenario_file(const std::string& path);

// Re-serialize to the scenario schema (speeds back in knots). Loading the
// result reproduces the scenario field-by-field.
std::string serialize_scenario(const AirspaceScenario& scenario);

// Invariant check over an already-constructed scenario; violations are data,
// not errors. Empty result iff all type invariants hold.
std::vector<Violation> validate(const AirspaceScenario& scenario);

}  // namespace tmacap
