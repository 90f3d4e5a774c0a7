#include "tmacap/pairwise_separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tmacap/errors.hpp"
#include "tmacap/format.hpp"
#include "tmacap/kinematics.hpp"

namespace tmacap {

namespace {

constexpr double kT0Tol = 1e-6;        // min
constexpr double kTimeEps = 1e-12;     // breakpoint dedup
constexpr double kReplayStep = 1e-3;   // min
constexpr double kReplayTol = 1e-6;    // NM slack for the replay guard
constexpr double kGridStep = 1e-4;     // min, fallback scan resolution

// Along-axis kinematic state of one aircraft on the common path. Upstream of
// MP_iap (including positions extrapolated behind the entry fix) the
// segment-1 deceleration applies; downstream the segment-2 one.
struct Motion {
  double v_mpkl = 0.0;
  double v_mpiap = 0.0;
  double v_thr = 0.0;
  double a1 = 0.0;  // signed, <= 0
  double a2 = 0.0;
  double t_mpkl = 0.0;   // crossing time of MP_kl
  double t_mpiap = 0.0;  // crossing time of MP_iap
};

Motion motion_for(const SpeedProfile& profile, double d_entry_to_mpkl, double d_common1,
                  double d_common2, double t_mpkl, double tcom1) {
  Motion m;
  const double d1_full = d_entry_to_mpkl + d_common1;
  m.a1 = segment_accel(d1_full, profile.v_entry, profile.v_mpiap);
  m.a2 = segment_accel(d_common2, profile.v_mpiap, profile.v_thr);
  m.v_mpkl = std::sqrt(profile.v_entry * profile.v_entry + 2.0 * m.a1 * d_entry_to_mpkl);
  m.v_mpiap = profile.v_mpiap;
  m.v_thr = profile.v_thr;
  m.t_mpkl = t_mpkl;
  m.t_mpiap = t_mpkl + tcom1;
  return m;
}

double speed_at_time(const Motion& m, double t) {
  if (t <= m.t_mpiap) return m.v_mpkl + m.a1 * (t - m.t_mpkl);
  return m.v_mpiap + m.a2 * (t - m.t_mpiap);
}

// Distance to the threshold along the common-path axis.
double dist_to_thr(const Motion& m, double d_common1, double d_common2, double t) {
  if (t <= m.t_mpiap) {
    const double dt = t - m.t_mpkl;
    return d_common1 + d_common2 - (m.v_mpkl * dt + 0.5 * m.a1 * dt * dt);
  }
  const double dt = t - m.t_mpiap;
  return d_common2 - (m.v_mpiap * dt + 0.5 * m.a2 * dt * dt);
}

struct Margins {
  double min_inpath_gap = 0.0;
  double final_gap = 0.0;
};

Margins closed_form_margins(const PairCombination& combo, double t0) {
  const auto subs = build_subintervals(combo, t0);
  Margins m;
  m.min_inpath_gap = std::numeric_limits<double>::infinity();
  for (const auto& sub : subs) {
    m.min_inpath_gap = std::min(m.min_inpath_gap, min_gap(sub).gap);
  }
  m.final_gap = gap_at(subs.back(), subs.back().t_end);
  return m;
}

// Independent check of a candidate t0: sample the gap from first-principles
// positions rather than the subinterval algebra.
bool replay_feasible(const PairCombination& combo, const CommonPathTimes& ct, double t0,
                     double s_req, double s_thr_req) {
  const Motion lead = motion_for(combo.lead_profile, combo.d_entry_to_mpkl_lead,
                                 combo.d_common1, combo.d_common2, 0.0, ct.lead_tcom1);
  const Motion trail = motion_for(combo.trail_profile, combo.d_entry_to_mpkl_trail,
                                  combo.d_common1, combo.d_common2, t0, ct.trail_tcom1);
  const double t_end = ct.lead_total();
  auto gap = [&](double t) {
    return dist_to_thr(trail, combo.d_common1, combo.d_common2, t) -
           dist_to_thr(lead, combo.d_common1, combo.d_common2, t);
  };
  for (double t = 0.0; t < t_end; t += kReplayStep) {
    if (gap(t) < s_req - kReplayTol) return false;
  }
  const double final_gap = gap(t_end);
  return final_gap >= s_req - kReplayTol && final_gap >= s_thr_req - kReplayTol;
}

}  // namespace

std::string PairCombination::label() const {
  return lead_class + "/" + lead_path + " -> " + trail_class + "/" + trail_path;
}

const char* to_string(BindingConstraint b) {
  return b == BindingConstraint::kInPath ? "in_path" : "threshold";
}

CommonPathTimes common_subpath_times(const PairCombination& combo) {
  const Motion lead = motion_for(combo.lead_profile, combo.d_entry_to_mpkl_lead,
                                 combo.d_common1, combo.d_common2, 0.0, 0.0);
  const Motion trail = motion_for(combo.trail_profile, combo.d_entry_to_mpkl_trail,
                                  combo.d_common1, combo.d_common2, 0.0, 0.0);
  CommonPathTimes ct;
  if (combo.d_common1 > 0.0) {
    ct.lead_tcom1 = combo.d_common1 / (0.5 * (lead.v_mpkl + lead.v_mpiap));
    ct.trail_tcom1 = combo.d_common1 / (0.5 * (trail.v_mpkl + trail.v_mpiap));
  }
  ct.lead_tcom2 = combo.d_common2 / (0.5 * (lead.v_mpiap + lead.v_thr));
  ct.trail_tcom2 = combo.d_common2 / (0.5 * (trail.v_mpiap + trail.v_thr));
  return ct;
}

std::vector<Subinterval> build_subintervals(const PairCombination& combo, double t0) {
  const CommonPathTimes ct = common_subpath_times(combo);
  const double t_end = ct.lead_total();

  if (!(t0 > 0.0) || !(t0 > ct.lead_tcom1 - ct.trail_tcom1) ||
      !(t0 > t_end - ct.trail_total())) {
    throw SolverError("infeasible t0=" + format_sig(t0) + " for " + combo.label() +
                      " (bounds: >0, >" + format_sig(ct.lead_tcom1 - ct.trail_tcom1) + ", >" +
                      format_sig(t_end - ct.trail_total()) + ")");
  }

  const Motion lead = motion_for(combo.lead_profile, combo.d_entry_to_mpkl_lead,
                                 combo.d_common1, combo.d_common2, 0.0, ct.lead_tcom1);
  const Motion trail = motion_for(combo.trail_profile, combo.d_entry_to_mpkl_trail,
                                  combo.d_common1, combo.d_common2, t0, ct.trail_tcom1);

  // Boundaries: the window ends plus each aircraft's MP_iap crossing instant.
  std::vector<double> bounds{0.0, t_end};
  for (double b : {lead.t_mpiap, trail.t_mpiap}) {
    if (b > kTimeEps && b < t_end - kTimeEps) bounds.push_back(b);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return b - a <= kTimeEps; }),
               bounds.end());

  std::vector<Subinterval> subs;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    Subinterval sub;
    sub.index = static_cast<int>(i + 1);
    sub.t_start = bounds[i];
    sub.t_end = bounds[i + 1];
    const double mid = 0.5 * (sub.t_start + sub.t_end);
    sub.lead_accel = mid < lead.t_mpiap ? lead.a1 : lead.a2;
    sub.trail_accel = mid < trail.t_mpiap ? trail.a1 : trail.a2;
    if (subs.empty()) {
      sub.lead_v_start = lead.v_mpkl;
      sub.trail_v_start = trail.v_mpkl + std::fabs(trail.a1) * t0;
      sub.s_n = (trail.v_mpkl + 0.5 * std::fabs(trail.a1) * t0) * t0;
    } else {
      const Subinterval& prev = subs.back();
      const double len = prev.t_end - prev.t_start;
      sub.lead_v_start = prev.lead_v_start - std::fabs(prev.lead_accel) * len;
      sub.trail_v_start = prev.trail_v_start - std::fabs(prev.trail_accel) * len;
      sub.s_n = gap_at(prev, prev.t_end);
    }
    subs.push_back(sub);
  }
  return subs;
}

double gap_at(const Subinterval& sub, double t) {
  if (t < sub.t_start - kTimeEps || t > sub.t_end + kTimeEps) {
    throw std::invalid_argument("gap_at: t=" + format_sig(t) + " outside [" +
                                format_sig(sub.t_start) + ", " + format_sig(sub.t_end) + "]");
  }
  const double dt = t - sub.t_start;
  return sub.s_n + (sub.lead_v_start - sub.trail_v_start) * dt -
         0.5 * (std::fabs(sub.lead_accel) - std::fabs(sub.trail_accel)) * dt * dt;
}

GapMinimum min_gap(const Subinterval& sub) {
  const double len = sub.t_end - sub.t_start;
  const double b = sub.lead_v_start - sub.trail_v_start;
  const double c = -0.5 * (std::fabs(sub.lead_accel) - std::fabs(sub.trail_accel));

  GapMinimum best{sub.t_start, sub.s_n};
  auto consider = [&](double dt) {
    const double g = sub.s_n + b * dt + c * dt * dt;
    if (g < best.gap) best = {sub.t_start + dt, g};
  };
  if (c > kTimeEps) {
    // Upward-opening: the interior vertex is the candidate minimum.
    const double dt_vertex = -b / (2.0 * c);
    if (dt_vertex > 0.0 && dt_vertex < len) consider(dt_vertex);
  }
  consider(len);
  return best;
}

namespace {

SpacingSolution grid_scan_fallback(const PairCombination& combo, const CommonPathTimes& ct,
                                   double lo, double hi, double s_req, double s_thr_req) {
  const long max_steps = static_cast<long>((hi - lo) / kGridStep) + 2;
  for (long k = 1; k <= max_steps; ++k) {
    const double t0 = lo + static_cast<double>(k) * kGridStep;
    const Margins m = closed_form_margins(combo, t0);
    if (m.min_inpath_gap >= s_req && m.final_gap >= s_thr_req &&
        replay_feasible(combo, ct, t0, s_req, s_thr_req)) {
      SpacingSolution sol;
      sol.t0_star = t0;
      sol.binding = (m.final_gap - s_thr_req <= m.min_inpath_gap - s_req)
                        ? BindingConstraint::kThreshold
                        : BindingConstraint::kInPath;
      sol.com_times = ct;
      sol.delta_t = ct.trail_total() + t0 - ct.lead_total();
      return sol;
    }
  }
  throw SolverError("grid fallback found no feasible t0 in [" + format_sig(lo) + ", " +
                    format_sig(hi) + "] for " + combo.label());
}

}  // namespace

SpacingSolution solve_min_t0(const PairCombination& combo, const SeparationPolicy& policy) {
  const double s_req = policy.s_for(combo.lead_class, combo.trail_class);
  const double s_thr_req = policy.s_thr;
  const CommonPathTimes ct = common_subpath_times(combo);
  const double t_end = ct.lead_total();

  const double lo =
      std::max({0.0, ct.lead_tcom1 - ct.trail_tcom1, t_end - ct.trail_total()});

  // Bracket from above: a spacing of S_thr plus the whole common path at the
  // slowest speed always suffices; double the offset if not.
  const double v_thr_min = std::min(combo.lead_profile.v_thr, combo.trail_profile.v_thr);
  double span = std::max(1e-3, (s_thr_req + combo.d_common1 + combo.d_common2) / v_thr_min);
  double hi = lo + span;
  int doublings = 0;
  for (;; ++doublings) {
    if (doublings > 64) {
      throw SolverError("no feasible upper bracket for " + combo.label());
    }
    const Margins m = closed_form_margins(combo, hi);
    if (m.min_inpath_gap >= s_req && m.final_gap >= s_thr_req) break;
    span *= 2.0;
    hi = lo + span;
  }

  auto bisect = [&](double a, double b, auto&& feasible) {
    while (b - a > kT0Tol) {
      const double mid = 0.5 * (a + b);
      if (feasible(mid)) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return b;
  };

  // Stage 1 (Fig. 4): smallest t0 whose in-path minimum reaches S.
  const double t0_s = bisect(lo, hi, [&](double t0) {
    return closed_form_margins(combo, t0).min_inpath_gap >= s_req;
  });

  SpacingSolution sol;
  sol.com_times = ct;
  if (closed_form_margins(combo, t0_s).final_gap >= s_thr_req) {
    sol.t0_star = t0_s;
    sol.binding = BindingConstraint::kInPath;
  } else {
    // Stage 2: the threshold constraint governs.
    sol.t0_star = bisect(t0_s, hi, [&](double t0) {
      return closed_form_margins(combo, t0).final_gap >= s_thr_req;
    });
    sol.binding = BindingConstraint::kThreshold;
  }
  sol.delta_t = ct.trail_total() + sol.t0_star - t_end;

  // Monotonicity guard: the bisection result must survive an independent
  // dense replay; otherwise re-solve by plain grid scan.
  if (!replay_feasible(combo, ct, sol.t0_star, s_req, s_thr_req)) {
    return grid_scan_fallback(combo, ct, lo, hi, s_req, s_thr_req);
  }
  return sol;
}

PairCombination make_combination(const AirspaceScenario& sc, std::size_t lead_path,
                                 std::size_t lead_class, std::size_t trail_path,
                                 std::size_t trail_class) {
  const ArrivalPath& pk = sc.paths.at(lead_path);
  const ArrivalPath& pl = sc.paths.at(trail_path);
  const PairGeometry& g = sc.geometry(lead_path, trail_path);

  PairCombination combo;
  combo.lead_path = pk.entry_point;
  combo.lead_class = pk.class_mix.at(lead_class).aircraft_class;
  combo.trail_path = pl.entry_point;
  combo.trail_class = pl.class_mix.at(trail_class).aircraft_class;
  combo.d_common1 = g.d_common1;
  combo.d_common2 = g.d_common2;
  const bool lead_is_a = lead_path <= trail_path;
  combo.d_entry_to_mpkl_lead = lead_is_a ? g.d_entry_to_mpkl_a : g.d_entry_to_mpkl_b;
  combo.d_entry_to_mpkl_trail = lead_is_a ? g.d_entry_to_mpkl_b : g.d_entry_to_mpkl_a;
  combo.lead_profile = pk.class_mix.at(lead_class).profile;
  combo.trail_profile = pl.class_mix.at(trail_class).profile;
  return combo;
}

const PairTableEntry* PairTable::find(std::size_t lead_path, std::size_t lead_class,
                                      std::size_t trail_path, std::size_t trail_class) const {
  for (const auto& e : entries) {
    if (e.lead_path_idx == lead_path && e.lead_class_idx == lead_class &&
        e.trail_path_idx == trail_path && e.trail_class_idx == trail_class) {
      return &e;
    }
  }
  return nullptr;
}

PairTable solve_all_pairs(const AirspaceScenario& sc) {
  PairTable table;
  const auto active = sc.active_paths();
  for (std::size_t k : active) {
    const ArrivalPath& pk = sc.paths[k];
    for (std::size_t i = 0; i < pk.class_mix.size(); ++i) {
      if (pk.class_mix[i].proportion <= 0.0) continue;
      for (std::size_t l : active) {
        const ArrivalPath& pl = sc.paths[l];
        for (std::size_t j = 0; j < pl.class_mix.size(); ++j) {
          if (pl.class_mix[j].proportion <= 0.0) continue;
          PairTableEntry entry;
          entry.lead_path_idx = k;
          entry.lead_class_idx = i;
          entry.trail_path_idx = l;
          entry.trail_class_idx = j;
          entry.combo = make_combination(sc, k, i, l, j);
          entry.probability = pk.traffic_proportion * pl.traffic_proportion *
                              pk.class_mix[i].proportion * pl.class_mix[j].proportion;
          try {
            entry.solution = solve_min_t0(entry.combo, sc.separation);
          } catch (const SolverError& e) {
            throw SolverError("combination " + entry.combo.label() + ": " + e.what());
          }
          table.entries.push_back(std::move(entry));
        }
      }
    }
  }
  return table;
}

std::string pair_table_csv(const PairTable& table) {
  std::ostringstream out;
  out << "lead_path,lead_class,trail_path,trail_class,probability,t0_min,delta_t_min,binding\n";
  for (const auto& e : table.entries) {
    out << e.combo.lead_path << ',' << e.combo.lead_class << ',' << e.combo.trail_path << ','
        << e.combo.trail_class << ',' << format_sig(e.probability) << ','
        << format_sig(e.solution.t0_star) << ',' << format_sig(e.solution.delta_t) << ','
        << to_string(e.solution.binding) << '\n';
  }
  return out.str();
}

}  // namespace tmacap
