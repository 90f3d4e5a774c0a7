#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tmacap/scenario.hpp"

// For every ordered (leading, trailing) aircraft combination, the smallest
// initial spacing time t0 such that the pair satisfies the in-TMA separation
// S over the whole common path and S_thr when the lead crosses the threshold,
// and the resulting minimal threshold-crossing time difference.

namespace tmacap {

// One ordered lead/trail combination with its oriented common-path geometry.
// d_entry_to_mpkl_lead + d_common1 equals the lead path's entry->MP_iap
// length (same for trail), so segment accelerations derive locally.
struct PairCombination {
  std::string lead_path;
  std::string lead_class;
  std::string trail_path;
  std::string trail_class;
  double d_common1 = 0.0;
  double d_common2 = 0.0;
  double d_entry_to_mpkl_lead = 0.0;
  double d_entry_to_mpkl_trail = 0.0;
  SpeedProfile lead_profile;
  SpeedProfile trail_profile;

  std::string label() const;
};

struct CommonPathTimes {
  double lead_tcom1 = 0.0;
  double lead_tcom2 = 0.0;
  double trail_tcom1 = 0.0;
  double trail_tcom2 = 0.0;

  double lead_total() const { return lead_tcom1 + lead_tcom2; }
  double trail_total() const { return trail_tcom1 + trail_tcom2; }
};

// Flight times over the two common subpaths for lead and trail (mean-speed
// rule over the subpath endpoint speeds; exact under constant deceleration).
// Both tcom1 values are 0 when the paths merge at MP_iap.
CommonPathTimes common_subpath_times(const PairCombination& combo);

// The window [0, lead_tcom1 + lead_tcom2] split where either aircraft crosses
// MP_iap; within a subinterval both accelerations are constant and the gap is
// a quadratic in t.
struct Subinterval {
  int index = 0;               // 1-based
  double t_start = 0.0;
  double t_end = 0.0;
  double s_n = 0.0;            // gap at t_start, NM
  double lead_accel = 0.0;     // signed, <= 0
  double trail_accel = 0.0;
  double lead_v_start = 0.0;   // NM/min
  double trail_v_start = 0.0;
};

// Partition the window for a given t0. Throws SolverError when t0 violates a
// feasibility bound (t0 <= 0, trail reaching MP_iap or THR before the lead).
std::vector<Subinterval> build_subintervals(const PairCombination& combo, double t0);

// Lead/trail along-path distance at t within the subinterval.
double gap_at(const Subinterval& sub, double t);

struct GapMinimum {
  double t = 0.0;
  double gap = 0.0;  // D_n*, NM
};

// Minimum of the quadratic gap over [t_start, t_end]: interior vertex when
// the parabola opens upward (|a_lead| < |a_trail|), else an endpoint.
GapMinimum min_gap(const Subinterval& sub);

enum class BindingConstraint { kInPath, kThreshold };

const char* to_string(BindingConstraint b);

struct SpacingSolution {
  double t0_star = 0.0;
  BindingConstraint binding = BindingConstraint::kInPath;
  double delta_t = 0.0;  // threshold-crossing time difference
  CommonPathTimes com_times;
};

// Smallest t0 meeting both separation constraints. Bisection on the margin
// (monotone in t0) to 1e-6 min, guarded by a dense kinematic replay with a
// grid-scan fallback.
SpacingSolution solve_min_t0(const PairCombination& combo, const SeparationPolicy& policy);

struct PairTableEntry {
  std::size_t lead_path_idx = 0;
  std::size_t lead_class_idx = 0;
  std::size_t trail_path_idx = 0;
  std::size_t trail_class_idx = 0;
  PairCombination combo;
  double probability = 0.0;  // rho_k * rho_l * p_i * p_j
  SpacingSolution solution;
};

struct PairTable {
  std::vector<PairTableEntry> entries;  // deterministic scenario order

  const PairTableEntry* find(std::size_t lead_path, std::size_t lead_class,
                             std::size_t trail_path, std::size_t trail_class) const;
};

// One solution per nonzero-probability ordered combination.
PairTable solve_all_pairs(const AirspaceScenario& scenario);

// Build the oriented combination for (lead path k / class i, trail path l /
// class j) from the scenario's pair-geometry table.
PairCombination make_combination(const AirspaceScenario& scenario, std::size_t lead_path,
                                 std::size_t lead_class, std::size_t trail_path,
                                 std::size_t trail_class);

std::string pair_table_csv(const PairTable& table);

}  // namespace tmacap
