#pragma once

// Test-side oracles, kept independent of the library's solution path: flight
// times by adaptive quadrature, pair gaps by first-principles kinematic
// replay, minimal t0 by grid scan over the replay, and seeded random
// scenario/combination generators.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "tmacap/pairwise_separation.hpp"
#include "tmacap/scenario.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Kinematics oracle: integrate 1/v(d) over the two segments.

inline double oracle_speed_at(double d1, double d2, const tmacap::SpeedProfile& p, double d) {
  if (d <= d1) {
    const double a1 = (p.v_mpiap * p.v_mpiap - p.v_entry * p.v_entry) / (2.0 * d1);
    return std::sqrt(std::max(0.0, p.v_entry * p.v_entry + 2.0 * a1 * d));
  }
  const double a2 = (p.v_thr * p.v_thr - p.v_mpiap * p.v_mpiap) / (2.0 * d2);
  return std::sqrt(std::max(0.0, p.v_mpiap * p.v_mpiap + 2.0 * a2 * (d - d1)));
}

namespace detail {

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double eps,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, eps / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, eps / 2.0, depth - 1);
}

}  // namespace detail

// Flight time as the integral of 1/speed over the along-path distance,
// integrating each segment separately to avoid the interior kink.
inline double numeric_path_time(double d1, double d2, const tmacap::SpeedProfile& p) {
  auto inv_v = [&](double d) { return 1.0 / oracle_speed_at(d1, d2, p, d); };
  double total = 0.0;
  for (auto [a, b] : {std::pair{0.0, d1}, std::pair{d1, d1 + d2}}) {
    if (b - a <= 0.0) continue;
    const double m = 0.5 * (a + b);
    total += detail::adaptive_simpson(inv_v, a, b, inv_v(a), inv_v(m), inv_v(b), 1e-12, 40);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Pair replay oracle: both aircraft as explicit piecewise motions on the
// common-path axis (distance to threshold).

struct ReplayAircraft {
  double v_mpkl = 0.0;
  double v_mpiap = 0.0;
  double a1 = 0.0;  // signed
  double a2 = 0.0;
  double t_mpkl = 0.0;
  double t_mpiap = 0.0;
  double d_common1 = 0.0;
  double d_common2 = 0.0;

  double dist_to_thr(double t) const {
    if (t <= t_mpiap) {
      const double dt = t - t_mpkl;
      return d_common1 + d_common2 - (v_mpkl * dt + 0.5 * a1 * dt * dt);
    }
    const double dt = t - t_mpiap;
    return d_common2 - (v_mpiap * dt + 0.5 * a2 * dt * dt);
  }
};

struct ReplayPair {
  ReplayAircraft lead;
  ReplayAircraft trail;
  double t_end = 0.0;  // lead threshold crossing

  double gap(double t) const { return trail.dist_to_thr(t) - lead.dist_to_thr(t); }
};

inline ReplayAircraft replay_aircraft(const tmacap::SpeedProfile& p, double d_entry_to_mpkl,
                                      double d_common1, double d_common2, double t_mpkl) {
  ReplayAircraft a;
  const double d1_full = d_entry_to_mpkl + d_common1;
  a.a1 = (p.v_mpiap * p.v_mpiap - p.v_entry * p.v_entry) / (2.0 * d1_full);
  a.a2 = (p.v_thr * p.v_thr - p.v_mpiap * p.v_mpiap) / (2.0 * d_common2);
  a.v_mpkl = std::sqrt(p.v_entry * p.v_entry + 2.0 * a.a1 * d_entry_to_mpkl);
  a.v_mpiap = p.v_mpiap;
  a.t_mpkl = t_mpkl;
  a.t_mpiap =
      t_mpkl + (d_common1 > 0.0 ? d_common1 / (0.5 * (a.v_mpkl + p.v_mpiap)) : 0.0);
  a.d_common1 = d_common1;
  a.d_common2 = d_common2;
  return a;
}

inline ReplayPair replay_pair(const tmacap::PairCombination& combo, double t0) {
  ReplayPair rp;
  rp.lead = replay_aircraft(combo.lead_profile, combo.d_entry_to_mpkl_lead, combo.d_common1,
                            combo.d_common2, 0.0);
  rp.trail = replay_aircraft(combo.trail_profile, combo.d_entry_to_mpkl_trail, combo.d_common1,
                             combo.d_common2, t0);
  rp.t_end = rp.lead.t_mpiap + combo.d_common2 / (0.5 * (rp.lead.v_mpiap + combo.lead_profile.v_thr));
  return rp;
}

struct ReplayMargins {
  double min_gap = 0.0;
  double final_gap = 0.0;
};

inline ReplayMargins replay_margins(const tmacap::PairCombination& combo, double t0,
                                    double step = 1e-3) {
  const ReplayPair rp = replay_pair(combo, t0);
  ReplayMargins m;
  m.min_gap = rp.gap(0.0);
  for (double t = 0.0; t < rp.t_end; t += step) {
    m.min_gap = std::min(m.min_gap, rp.gap(t));
  }
  m.final_gap = rp.gap(rp.t_end);
  m.min_gap = std::min(m.min_gap, m.final_gap);
  return m;
}

inline bool replay_satisfies(const tmacap::PairCombination& combo, double t0, double s,
                             double s_thr, double slack = 0.0, double step = 1e-3) {
  const ReplayMargins m = replay_margins(combo, t0, step);
  return m.min_gap >= s - slack && m.final_gap >= s_thr - slack;
}

// Smallest t0 on the 1e-4 min lattice above the feasibility bounds whose
// dense replay satisfies both separations. The scan is staged (coarse to
// fine) purely for speed; the replay margin grows with t0, so the staged
// result equals the full left-to-right scan.
inline double brute_force_min_t0(const tmacap::PairCombination& combo, double s, double s_thr,
                                 double grid = 1e-4) {
  const ReplayPair probe = replay_pair(combo, 1.0);
  const double lead_total = probe.t_end;
  const double trail_tcom1 = probe.trail.t_mpiap - probe.trail.t_mpkl;
  const double trail_tcom2 =
      combo.d_common2 / (0.5 * (combo.trail_profile.v_mpiap + combo.trail_profile.v_thr));
  const double lead_tcom1 = probe.lead.t_mpiap;
  const double lo = std::max({0.0, lead_tcom1 - trail_tcom1,
                              lead_total - (trail_tcom1 + trail_tcom2)});

  auto feasible_at = [&](long k) {
    return replay_satisfies(combo, lo + static_cast<double>(k) * grid, s, s_thr);
  };

  const double v_thr_min = std::min(combo.lead_profile.v_thr, combo.trail_profile.v_thr);
  double span = std::max(1e-3, (s_thr + combo.d_common1 + combo.d_common2) / v_thr_min);
  long hi_k = static_cast<long>(std::ceil(span / grid));
  for (int i = 0; i < 64 && !feasible_at(hi_k); ++i) hi_k *= 2;
  if (!feasible_at(hi_k)) throw std::runtime_error("brute force: no feasible upper bound");

  long first_feasible = hi_k;
  for (long stride : {500L, 10L, 1L}) {
    long k = first_feasible;
    while (k - stride >= 1 && feasible_at(k - stride)) k -= stride;
    first_feasible = k;
  }
  return lo + static_cast<double>(first_feasible) * grid;
}

// ---------------------------------------------------------------------------
// Random inputs.

inline tmacap::SpeedProfile random_profile(std::mt19937_64& rng, double lo_kt = 140.0,
                                           double hi_kt = 400.0) {
  std::uniform_real_distribution<double> u(lo_kt, hi_kt);
  double v[3] = {u(rng), u(rng), u(rng)};
  std::sort(std::begin(v), std::end(v));
  return {v[2] / 60.0, v[1] / 60.0, v[0] / 60.0};
}

inline tmacap::SeparationPolicy random_policy(std::mt19937_64& rng) {
  static const std::pair<double, double> kRegimes[] = {
      {3, 3}, {3, 5}, {3, 8}, {5, 5}, {5, 8}};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kRegimes) - 1);
  const auto [s, s_thr] = kRegimes[pick(rng)];
  tmacap::SeparationPolicy policy;
  policy.s_tma = s;
  policy.s_thr = s_thr;
  return policy;
}

inline tmacap::PairCombination random_combo(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> len(5.0, 60.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  tmacap::PairCombination combo;
  combo.lead_path = "K";
  combo.lead_class = "A";
  combo.trail_path = "L";
  combo.trail_class = "B";
  combo.d_common2 = len(rng);
  combo.lead_profile = random_profile(rng);
  const double shape = frac(rng);
  if (shape < 0.3) {
    // Same path; half the time the identical aircraft.
    combo.trail_path = "K";
    combo.d_common1 = len(rng);
    combo.d_entry_to_mpkl_lead = 0.0;
    combo.d_entry_to_mpkl_trail = 0.0;
    combo.trail_profile = frac(rng) < 0.5 ? combo.lead_profile : random_profile(rng);
    if (combo.trail_profile.v_entry == combo.lead_profile.v_entry) combo.trail_class = "A";
  } else if (shape < 0.65) {
    // Distinct paths merging at MP_iap.
    combo.d_common1 = 0.0;
    combo.d_entry_to_mpkl_lead = len(rng);
    combo.d_entry_to_mpkl_trail = len(rng);
    combo.trail_profile = random_profile(rng);
  } else {
    // Distinct paths sharing a common stretch upstream of MP_iap.
    std::uniform_real_distribution<double> stub(1.0, 30.0);
    combo.d_common1 = std::uniform_real_distribution<double>(2.0, 30.0)(rng);
    combo.d_entry_to_mpkl_lead = stub(rng);
    combo.d_entry_to_mpkl_trail = stub(rng);
    combo.trail_profile = random_profile(rng);
  }
  return combo;
}

// Random but always-valid scenario, built through the loader so it satisfies
// every scenario invariant by construction.
inline tmacap::AirspaceScenario random_scenario(std::mt19937_64& rng, int max_paths = 3) {
  std::uniform_int_distribution<int> n_paths_dist(1, max_paths);
  std::uniform_real_distribution<double> d1(10.0, 60.0);
  std::uniform_real_distribution<double> d2_dist(6.0, 15.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);

  const int n_paths = n_paths_dist(rng);
  const double d2 = d2_dist(rng);

  nlohmann::json root;
  root["name"] = "random";
  root["runway"] = "RWYX";
  const auto policy = random_policy(rng);
  root["separation"] = {{"s_tma_nm", policy.s_tma}, {"s_thr_nm", policy.s_thr}};

  std::vector<double> props(n_paths);
  double prop_sum = 0.0;
  for (auto& p : props) {
    p = 0.05 + frac(rng);
    prop_sum += p;
  }

  nlohmann::json paths = nlohmann::json::array();
  std::vector<double> d1s(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    d1s[i] = d1(rng);
    nlohmann::json jp;
    jp["entry"] = std::string(1, static_cast<char>('A' + i));
    // Last path takes the remainder so the sum is exactly 1.
    double prop = props[i] / prop_sum;
    if (i == n_paths - 1) {
      double acc = 0.0;
      for (int k = 0; k < n_paths - 1; ++k) acc += props[k] / prop_sum;
      prop = 1.0 - acc;
    }
    jp["proportion"] = prop;
    jp["d_entry_mpiap_nm"] = d1s[i];
    jp["d_mpiap_thr_nm"] = d2;
    const int n_classes = frac(rng) < 0.5 ? 1 : 2;
    nlohmann::json classes = nlohmann::json::array();
    double split = n_classes == 1 ? 1.0 : 0.2 + 0.6 * frac(rng);
    for (int c = 0; c < n_classes; ++c) {
      const tmacap::SpeedProfile sp = random_profile(rng);
      classes.push_back({{"class", c == 0 ? "M" : "H"},
                         {"proportion", c == 0 ? split : 1.0 - split},
                         {"v_entry_kt", sp.v_entry * 60.0},
                         {"v_mpiap_kt", sp.v_mpiap * 60.0},
                         {"v_thr_kt", sp.v_thr * 60.0}});
    }
    jp["classes"] = classes;
    paths.push_back(std::move(jp));
  }
  root["paths"] = paths;

  nlohmann::json geom = nlohmann::json::array();
  for (int a = 0; a < n_paths; ++a) {
    for (int b = a + 1; b < n_paths; ++b) {
      if (frac(rng) < 0.5) continue;  // merge at MP_iap
      const double cap = 0.5 * std::min(d1s[a], d1s[b]);
      geom.push_back({{"path_a", std::string(1, static_cast<char>('A' + a))},
                      {"path_b", std::string(1, static_cast<char>('A' + b))},
                      {"d_common1_nm", cap * frac(rng)}});
    }
  }
  root["pair_geometry"] = geom;

  return tmacap::load_scenario(root.dump());
}

}  // namespace oracle
