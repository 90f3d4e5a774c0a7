#include "tmacap/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tmacap/scenario.hpp"

namespace tmacap {

SegmentKinematics SegmentKinematics::from_endpoints(double length, double v_start,
                                                    double v_end) {
  return SegmentKinematics{length, v_start, v_end, segment_accel(length, v_start, v_end)};
}

double segment_accel(double length_nm, double v_start, double v_end) {
  if (!(length_nm > 0.0)) {
    throw std::invalid_argument("segment_accel: length must be positive, got " +
                                std::to_string(length_nm));
  }
  if (!(v_end > 0.0) || v_end > v_start) {
    throw std::invalid_argument("segment_accel: accelerating or non-positive profile (v_start=" +
                                std::to_string(v_start) + ", v_end=" + std::to_string(v_end) +
                                ")");
  }
  return (v_end * v_end - v_start * v_start) / (2.0 * length_nm);
}

double path_flight_time(double d1_nm, double d2_nm, const SpeedProfile& p) {
  return d1_nm / (0.5 * (p.v_entry + p.v_mpiap)) + d2_nm / (0.5 * (p.v_mpiap + p.v_thr));
}

double speed_at_offset(double d1_nm, double d2_nm, const SpeedProfile& p,
                       double d_from_entry_nm) {
  if (d_from_entry_nm < 0.0 || d_from_entry_nm > d1_nm + d2_nm) {
    throw std::invalid_argument("speed_at_offset: offset " + std::to_string(d_from_entry_nm) +
                                " outside [0, " + std::to_string(d1_nm + d2_nm) + "]");
  }
  if (d_from_entry_nm < d1_nm) {
    const double a1 = segment_accel(d1_nm, p.v_entry, p.v_mpiap);
    return std::sqrt(p.v_entry * p.v_entry + 2.0 * a1 * d_from_entry_nm);
  }
  // Segment boundary resolves here; the radicand is exact at d = d1.
  const double a2 = segment_accel(d2_nm, p.v_mpiap, p.v_thr);
  return std::sqrt(p.v_mpiap * p.v_mpiap + 2.0 * a2 * (d_from_entry_nm - d1_nm));
}

double upstream_extrapolated_speed(const SpeedProfile& p, double seg1_accel,
                                   double d_upstream_nm) {
  return std::sqrt(p.v_entry * p.v_entry + 2.0 * std::fabs(seg1_accel) * d_upstream_nm);
}

}  // namespace tmacap
