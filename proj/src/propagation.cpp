#include "srsim/propagation.hpp"

#include <cmath>

namespace srsim {

double distance_m(const Position& a, const Position& b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

double friis_path_loss_db(double distance_m, double frequency_hz)
{
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) +
         20.0 * std::log10(4.0 * M_PI / kSpeedOfLight);
}

double friis_distance_for_loss(double loss_db, double frequency_hz)
{
  const double fixed = 20.0 * std::log10(frequency_hz) +
                       20.0 * std::log10(4.0 * M_PI / kSpeedOfLight);
  return std::pow(10.0, (loss_db - fixed) / 20.0);
}

} // namespace srsim
