#pragma once

// Canonical internal units: NM for distance, minutes for time, NM/min for
// speed, NM/min^2 for acceleration. Scenario files carry speeds in knots.

namespace tmacap {

inline constexpr double kMinutesPerHour = 60.0;

inline double kt_to_nm_per_min(double kt) { return kt / kMinutesPerHour; }
inline double nm_per_min_to_kt(double v) { return v * kMinutesPerHour; }

}  // namespace tmacap
