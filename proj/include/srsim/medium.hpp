#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srsim/mcs.hpp"
#include "srsim/propagation.hpp"
#include "srsim/units.hpp"

namespace srsim {

enum class FrameKind { Data, Ack, Beacon };

enum class FrameOutcome { None, Pending, Success, Corrupted };

/// One on-air transmission. `dst < 0` means broadcast (beacons).
struct Frame {
  std::uint64_t id = 0;
  FrameKind kind = FrameKind::Data;
  int src = -1;
  int dst = -1;
  int color = 0;
  int mcs = 0;
  double txpow_dbm = 0.0;
  std::uint32_t payload_bytes = 0;
  Micros start = 0;
  Micros end = 0;
  std::uint64_t ack_for = 0; // Ack frames: id of the data frame being acked
};

enum class PreambleVerdict {
  NotHeard,
  IntraBss,
  InterBssAboveThreshold,
  InterBssIgnorable,
};

/// Classifies a heard (or not) frame at a receiver. Inter-BSS frames below
/// the receiver's OBSS/PD threshold are ignorable for carrier sensing; a
/// color match always counts.
PreambleVerdict detect_preamble(double rssi_dbm, int frame_color, int rx_color,
                                double rx_obss_pd_dbm, double preamble_thr_dbm);

struct PhyParams {
  double frequency_hz = 5e9;
  double preamble_detection_dbm = -82.0;
  double rx_sensitivity_dbm = -82.0;
  double cca_ed_dbm = -62.0;
  double noise_floor_dbm = -94.0; // thermal + NF for a 20 MHz channel
};

/// Reception bookkeeping for an addressed frame at its destination. The
/// receive level is fixed at frame start (static channel); every overlapping
/// transmission contributes interference for the whole frame.
struct OngoingReception {
  std::uint64_t frame_id = 0;
  double rssi_dbm = 0.0;
  double interference_mw = 0.0;
  bool dst_transmitted = false;
  std::vector<std::pair<std::uint64_t, double>> interferers; // (frame id, dBm)
};

/// The shared radio channel: tracks what is on air, caches the receive level
/// of every frame at every node, decides reception outcomes and answers
/// carrier-sense queries.
class Medium {
 public:
  Medium(std::vector<Position> positions, std::vector<int> colors, PhyParams phy,
         const McsTable* mcs);

  int n_nodes() const { return static_cast<int>(positions_.size()); }
  const PhyParams& phy() const { return phy_; }
  const Propagation& propagation() const { return prop_; }

  double link_rssi_dbm(int tx, int rx, double txpow_dbm) const;

  void frame_started(const Frame& f);

  struct EndResult {
    FrameOutcome outcome = FrameOutcome::None;
    double rssi_dbm = 0.0;
    double sinr_db = 0.0;
  };
  EndResult frame_ended(const Frame& f);

  /// Receive level of an on-air frame at `node` (cached at frame start).
  double frame_rssi_dbm(std::uint64_t frame_id, int node) const;

  /// Carrier sense for `node` with its current OBSS/PD threshold: busy on a
  /// decodable intra-BSS preamble, on an inter-BSS preamble at/above the
  /// threshold, or when total in-band energy reaches the CCA/ED level.
  bool channel_busy(int node, double obss_pd_dbm, Micros now) const;

  /// Linear sum of all on-air signals at `node`, own transmissions excluded.
  double energy_mw(int node, Micros now) const;

  std::size_t on_air_count() const { return on_air_.size(); }
  const OngoingReception* reception(std::uint64_t frame_id) const;

 private:
  struct AirFrame {
    Frame frame;
    std::vector<double> rssi_dbm;          // per node
    std::vector<double> rssi_mw;           // same, linear (carrier-sense hot path)
    std::optional<OngoingReception> rx;    // only for addressed frames
  };

  const AirFrame* find(std::uint64_t frame_id) const;

  std::vector<Position> positions_;
  std::vector<int> colors_;
  PhyParams phy_;
  Propagation prop_;
  const McsTable* mcs_;
  std::vector<AirFrame> on_air_;
};

} // namespace srsim
