#pragma once

namespace srsim {

constexpr double kSpeedOfLight = 299'792'458.0;

/// Free-space propagation is only valid in the far field; scenario loading
/// rejects any node pair closer than this.
constexpr double kFarFieldMinMeters = 1.0;

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance_m(const Position& a, const Position& b);

/// Friis free-space loss: 20 log10(d) + 20 log10(f) + 20 log10(4*pi/c), dB.
double friis_path_loss_db(double distance_m, double frequency_hz);

/// Distance at which friis_path_loss_db equals `loss_db`.
double friis_distance_for_loss(double loss_db, double frequency_hz);

/// Static channel: received level is transmit power minus Friis loss.
class Propagation {
 public:
  explicit Propagation(double frequency_hz) : frequency_hz_(frequency_hz) {}

  double frequency_hz() const { return frequency_hz_; }
  double path_loss_db(double dist_m) const { return friis_path_loss_db(dist_m, frequency_hz_); }
  double rssi_dbm(double txpow_dbm, double dist_m) const
  {
    return txpow_dbm - path_loss_db(dist_m);
  }

 private:
  double frequency_hz_;
};

} // namespace srsim
