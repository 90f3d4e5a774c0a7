#pragma once

#include <string>
#include <vector>

#include "tmacap/scenario.hpp"

// Sweep engine for the speed-scaling / separation-regime sensitivity
// analysis; emits plot-ready rows of D_temp, T_thr and lambda.

namespace tmacap {

struct SeparationRegime {
  double s_tma = 0.0;
  double s_thr = 0.0;
};

struct SweepSpec {
  std::vector<double> speed_scale_grid;      // fractions, e.g. -0.10 .. +0.10
  std::vector<SeparationRegime> regimes;
  bool scale_thr_speeds = false;             // threshold speeds held fixed by default

  // -10% .. +10% in 1% steps over the four baseline regimes.
  static SweepSpec defaults();
  static std::vector<double> make_grid(double lo, double hi, double step);
};

enum class SweepRowStatus { kOk, kSkipped };

struct SweepRow {
  SeparationRegime regime;
  double speed_scale = 0.0;
  double d_temp_min = 0.0;
  double t_bar_thr_min = 0.0;
  double lambda = 0.0;
  SweepRowStatus status = SweepRowStatus::kOk;
  std::string note;  // reason when skipped
};

// Multiply entry and MP_iap speeds by (1 + fraction), threshold speeds only
// when scale_thr is set. Throws ScenarioError when a scaled profile stops
// being monotone non-increasing.
AirspaceScenario scale_speeds(const AirspaceScenario& scenario, double fraction,
                              bool scale_thr = false);

// Regime-major, scale-minor rows; a failed row is emitted with a skipped
// marker rather than aborting the sweep.
std::vector<SweepRow> run_sweep(const AirspaceScenario& scenario, const SweepSpec& spec);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace tmacap
