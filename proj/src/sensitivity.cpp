#include "tmacap/sensitivity.hpp"

#include <cmath>
#include <sstream>

#include "tmacap/capacity.hpp"
#include "tmacap/errors.hpp"
#include "tmacap/format.hpp"

namespace tmacap {

SweepSpec SweepSpec::defaults() {
  SweepSpec spec;
  spec.speed_scale_grid = make_grid(-0.10, 0.10, 0.01);
  spec.regimes = {{5.0, 8.0}, {5.0, 5.0}, {3.0, 5.0}, {3.0, 3.0}};
  return spec;
}

std::vector<double> SweepSpec::make_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  const int n = static_cast<int>(std::round((hi - lo) / step));
  for (int i = 0; i <= n; ++i) {
    // Round to the step lattice so 0.0 is exact and CSV output stays clean.
    grid.push_back(std::round((lo + i * step) * 1e12) / 1e12);
  }
  return grid;
}

AirspaceScenario scale_speeds(const AirspaceScenario& sc, double fraction, bool scale_thr) {
  AirspaceScenario out = sc;
  const double f = 1.0 + fraction;
  for (auto& path : out.paths) {
    for (auto& c : path.class_mix) {
      c.profile.v_entry *= f;
      c.profile.v_mpiap *= f;
      if (scale_thr) c.profile.v_thr *= f;
      if (c.profile.v_mpiap < c.profile.v_thr) {
        throw ScenarioError("scale_speeds: scaled MP_iap speed falls below threshold speed for " +
                            c.aircraft_class + " on path " + path.entry_point + " at scale " +
                            format_sig(fraction));
      }
      if (!(c.profile.v_thr > 0.0)) {
        throw ScenarioError("scale_speeds: non-positive threshold speed for " +
                            c.aircraft_class + " on path " + path.entry_point);
      }
    }
  }
  return out;
}

std::vector<SweepRow> run_sweep(const AirspaceScenario& sc, const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  rows.reserve(spec.regimes.size() * spec.speed_scale_grid.size());
  for (const SeparationRegime& regime : spec.regimes) {
    for (double scale : spec.speed_scale_grid) {
      SweepRow row;
      row.regime = regime;
      row.speed_scale = scale;
      try {
        AirspaceScenario scaled = scale_speeds(sc, scale, spec.scale_thr_speeds);
        scaled.separation.s_tma = regime.s_tma;
        scaled.separation.s_thr = regime.s_thr;
        const CapacityReport report = capacity(scaled);
        row.d_temp_min = report.d_temp_min;
        row.t_bar_thr_min = report.t_bar_thr_min;
        row.lambda = report.lambda;
      } catch (const std::exception& e) {
        row.status = SweepRowStatus::kSkipped;
        row.note = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "regime_s_nm,regime_sthr_nm,speed_scale,d_temp_min,t_bar_thr_min,lambda,status\n";
  for (const auto& r : rows) {
    out << format_sig(r.regime.s_tma) << ',' << format_sig(r.regime.s_thr) << ','
        << format_sig(r.speed_scale) << ',';
    if (r.status == SweepRowStatus::kOk) {
      out << format_sig(r.d_temp_min) << ',' << format_sig(r.t_bar_thr_min) << ','
          << format_sig(r.lambda) << ",ok\n";
    } else {
      out << ",,,skipped\n";
    }
  }
  return out.str();
}

}  // namespace tmacap
