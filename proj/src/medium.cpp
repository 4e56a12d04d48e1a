#include "srsim/medium.hpp"

#include <algorithm>
#include <stdexcept>

namespace srsim {

PreambleVerdict detect_preamble(double rssi_dbm, int frame_color, int rx_color,
                                double rx_obss_pd_dbm, double preamble_thr_dbm)
{
  if (rssi_dbm < preamble_thr_dbm) return PreambleVerdict::NotHeard;
  if (frame_color == rx_color) return PreambleVerdict::IntraBss;
  if (rssi_dbm < rx_obss_pd_dbm) return PreambleVerdict::InterBssIgnorable;
  return PreambleVerdict::InterBssAboveThreshold;
}

Medium::Medium(std::vector<Position> positions, std::vector<int> colors,
               PhyParams phy, const McsTable* mcs)
    : positions_(std::move(positions)), colors_(std::move(colors)), phy_(phy),
      prop_(phy.frequency_hz), mcs_(mcs)
{
  if (positions_.size() != colors_.size())
    throw std::logic_error("Medium: positions/colors size mismatch");
}

double Medium::link_rssi_dbm(int tx, int rx, double txpow_dbm) const
{
  const double d = distance_m(positions_[static_cast<std::size_t>(tx)],
                              positions_[static_cast<std::size_t>(rx)]);
  return prop_.rssi_dbm(txpow_dbm, d);
}

void Medium::frame_started(const Frame& f)
{
  AirFrame af;
  af.frame = f;
  af.rssi_dbm.resize(positions_.size(), 0.0);
  af.rssi_mw.resize(positions_.size(), 0.0);
  for (int n = 0; n < n_nodes(); ++n) {
    if (n == f.src) continue;
    const double rssi = link_rssi_dbm(f.src, n, f.txpow_dbm);
    af.rssi_dbm[static_cast<std::size_t>(n)] = rssi;
    af.rssi_mw[static_cast<std::size_t>(n)] = dbm_to_mw(rssi);
  }

  // Fold the newcomer into every ongoing reception, and seed its own
  // reception with everything already on air. Frames whose end time equals
  // the current instant do not overlap (half-open air intervals).
  for (auto& other : on_air_) {
    if (other.frame.end <= f.start) continue;
    if (other.rx.has_value()) {
      auto& rx = *other.rx;
      const double at_dst = af.rssi_dbm[static_cast<std::size_t>(other.frame.dst)];
      rx.interference_mw += dbm_to_mw(at_dst);
      rx.interferers.emplace_back(f.id, at_dst);
      if (f.src == other.frame.dst) rx.dst_transmitted = true;
    }
  }

  if (f.dst >= 0) {
    OngoingReception rx;
    rx.frame_id = f.id;
    rx.rssi_dbm = af.rssi_dbm[static_cast<std::size_t>(f.dst)];
    for (const auto& other : on_air_) {
      if (other.frame.end <= f.start) continue;
      if (other.frame.src == f.dst) rx.dst_transmitted = true;
      const double at_dst = other.rssi_dbm[static_cast<std::size_t>(f.dst)];
      rx.interference_mw += dbm_to_mw(at_dst);
      rx.interferers.emplace_back(other.frame.id, at_dst);
    }
    af.rx = rx;
  }

  on_air_.push_back(std::move(af));
}

Medium::EndResult Medium::frame_ended(const Frame& f)
{
  auto it = std::find_if(on_air_.begin(), on_air_.end(),
                         [&](const AirFrame& af) { return af.frame.id == f.id; });
  if (it == on_air_.end()) throw std::logic_error("Medium: unknown frame ended");

  EndResult r;
  if (it->rx.has_value()) {
    const OngoingReception& rx = *it->rx;
    const double noise_mw = dbm_to_mw(phy_.noise_floor_dbm);
    const double sinr = rx.rssi_dbm - mw_to_dbm(rx.interference_mw + noise_mw);
    const McsEntry& m = mcs_->at(f.mcs);
    const bool ok = !rx.dst_transmitted && rx.rssi_dbm >= m.min_rssi_dbm &&
                    sinr >= m.min_sinr_db;
    r.outcome = ok ? FrameOutcome::Success : FrameOutcome::Corrupted;
    r.rssi_dbm = rx.rssi_dbm;
    r.sinr_db = sinr;
  }
  on_air_.erase(it);
  return r;
}

double Medium::frame_rssi_dbm(std::uint64_t frame_id, int node) const
{
  const AirFrame* af = find(frame_id);
  if (af == nullptr) throw std::logic_error("Medium: unknown frame");
  return af->rssi_dbm[static_cast<std::size_t>(node)];
}

bool Medium::channel_busy(int node, double obss_pd_dbm, Micros now) const
{
  const int color = colors_[static_cast<std::size_t>(node)];
  double energy = 0.0;
  for (const auto& af : on_air_) {
    if (af.frame.src == node) continue;
    if (af.frame.end <= now) continue;
    const double rssi = af.rssi_dbm[static_cast<std::size_t>(node)];
    energy += af.rssi_mw[static_cast<std::size_t>(node)];
    switch (detect_preamble(rssi, af.frame.color, color, obss_pd_dbm,
                            phy_.preamble_detection_dbm)) {
      case PreambleVerdict::IntraBss:
      case PreambleVerdict::InterBssAboveThreshold:
        return true;
      case PreambleVerdict::NotHeard:
      case PreambleVerdict::InterBssIgnorable:
        break;
    }
  }
  return energy >= dbm_to_mw(phy_.cca_ed_dbm);
}

double Medium::energy_mw(int node, Micros now) const
{
  double energy = 0.0;
  for (const auto& af : on_air_) {
    if (af.frame.src == node) continue;
    if (af.frame.end <= now) continue;
    energy += af.rssi_mw[static_cast<std::size_t>(node)];
  }
  return energy;
}

const OngoingReception* Medium::reception(std::uint64_t frame_id) const
{
  const AirFrame* af = find(frame_id);
  if (af == nullptr || !af->rx.has_value()) return nullptr;
  return &*af->rx;
}

const Medium::AirFrame* Medium::find(std::uint64_t frame_id) const
{
  for (const auto& af : on_air_) {
    if (af.frame.id == frame_id) return &af;
  }
  return nullptr;
}

} // namespace srsim
