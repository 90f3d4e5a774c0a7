#pragma once

// Closed-form constant-deceleration kinematics along a two-segment arrival
// path. The speed profile is pinned at three gates (entry, IAP merging
// point, threshold); each segment has one constant acceleration.

namespace tmacap {

struct SpeedProfile;

struct SegmentKinematics {
  double length = 0.0;   // NM
  double v_start = 0.0;  // NM/min
  double v_end = 0.0;    // NM/min
  double accel = 0.0;    // NM/min^2, <= 0

  static SegmentKinematics from_endpoints(double length, double v_start, double v_end);
};

// (v_end^2 - v_start^2) / (2 * length). Throws std::invalid_argument on
// non-positive length or an accelerating profile (v_end > v_start).
double segment_accel(double length_nm, double v_start, double v_end);

// Total flight time over both segments using the mean-speed rule, which is
// exact under constant acceleration: d1/((vE+vMP)/2) + d2/((vMP+vTHR)/2).
double path_flight_time(double d1_nm, double d2_nm, const SpeedProfile& profile);

// Speed at an along-path offset d from the entry point, 0 <= d <= d1 + d2.
// Offsets exactly at the segment boundary resolve to the second segment;
// both branches agree there by construction.
double speed_at_offset(double d1_nm, double d2_nm, const SpeedProfile& profile,
                       double d_from_entry_nm);

// Speed a trailing aircraft would have d NM upstream of the entry fix,
// extrapolating the segment-1 deceleration backwards: sqrt(vE^2 + 2|a1|d).
double upstream_extrapolated_speed(const SpeedProfile& profile, double seg1_accel,
                                   double d_upstream_nm);

}  // namespace tmacap
