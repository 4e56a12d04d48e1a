#pragma once

#include <cmath>
#include <cstdint>

namespace srsim {

/// Simulation time in integer microseconds. Slot (9 us), SIFS (16 us) and
/// DIFS (34 us) are all integral, so event ordering never depends on
/// floating-point rounding.
using Micros = std::int64_t;

constexpr Micros kMicrosPerSecond = 1'000'000;

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

inline Micros seconds_to_micros(double s)
{
  return static_cast<Micros>(std::llround(s * 1e6));
}

inline double micros_to_seconds(Micros t) { return static_cast<double>(t) / 1e6; }

} // namespace srsim
