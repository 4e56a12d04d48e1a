#include "srsim/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "srsim/errors.hpp"

namespace srsim {

ObssPdBounds ObssPdBounds::for_bandwidth_mhz(int mhz)
{
  switch (mhz) {
    case 20: return {-82.0, -62.0, 21.0};
    case 40: return {-79.0, -59.0, 18.0};
    case 80: return {-76.0, -56.0, 15.0};
    case 160: return {-73.0, -53.0, 12.0};
    default: throw ConfigError("unsupported bandwidth: " + std::to_string(mhz) + " MHz");
  }
}

double txpow_from_threshold(double obss_pd_dbm, const ObssPdBounds& bounds)
{
  if (obss_pd_dbm < bounds.min_dbm || obss_pd_dbm > bounds.max_dbm)
    throw std::logic_error("txpow_from_threshold: threshold outside bounds");
  return bounds.txpow_ref_dbm - (obss_pd_dbm - bounds.min_dbm);
}

double ofc_ewma_update(double prev, double count, double alpha)
{
  return alpha * count + (1.0 - alpha) * prev;
}

const char* to_string(ControllerKind k)
{
  switch (k) {
    case ControllerKind::Racebot: return "racebot";
    case ControllerKind::Dsc: return "dsc";
    case ControllerKind::Rtot: return "rtot";
    case ControllerKind::NoObssPd: return "no-obsspd";
    case ControllerKind::Fixed: return "fixed";
  }
  return "?";
}

std::optional<ControllerKind> controller_kind_from_string(const std::string& s)
{
  if (s == "racebot") return ControllerKind::Racebot;
  if (s == "dsc") return ControllerKind::Dsc;
  if (s == "rtot") return ControllerKind::Rtot;
  if (s == "no-obsspd") return ControllerKind::NoObssPd;
  if (s == "fixed") return ControllerKind::Fixed;
  return std::nullopt;
}

const char* to_string(RacebotBranch b)
{
  switch (b) {
    case RacebotBranch::None: return "none";
    case RacebotBranch::NoDrop: return "no-drop";
    case RacebotBranch::Drop: return "drop";
    case RacebotBranch::DropRaised: return "drop-raised";
  }
  return "?";
}

ThresholdController::ThresholdController(const ObssPdBounds& bounds)
    : bounds_(bounds), obss_pd_(bounds.min_dbm), txpow_(bounds.txpow_ref_dbm)
{
}

void ThresholdController::observe_beacon(double rssi_dbm)
{
  beacon_ewma_ = beacon_seen_
                     ? beacon_alpha_ * rssi_dbm + (1.0 - beacon_alpha_) * beacon_ewma_
                     : rssi_dbm;
  beacon_seen_ = true;
}

void ThresholdController::set_threshold(double obss_pd_dbm)
{
  obss_pd_ = obss_pd_dbm;
  txpow_ = txpow_from_threshold(obss_pd_dbm, bounds_);
}

ControllerStep ThresholdController::hold() const
{
  ControllerStep out;
  out.obss_pd_dbm = obss_pd_;
  out.txpow_dbm = txpow_;
  return out;
}

RacebotController::RacebotController(const ObssPdBounds& bounds, RacebotParams params)
    : ThresholdController(bounds), params_(params)
{
  beacon_alpha_ = params_.alpha;
}

void RacebotController::restore(double obss_pd_dbm, double goal_dbm)
{
  set_threshold(std::clamp(obss_pd_dbm, bounds_.min_dbm, bounds_.max_dbm));
  goal_ = goal_dbm;
}

void RacebotController::observe_obss(double rssi_dbm)
{
  const int bin = static_cast<int>(std::floor(rssi_dbm / params_.bin_width_db));
  histogram_[bin].count += 1;
}

std::map<int, std::uint64_t> RacebotController::period_counts() const
{
  std::map<int, std::uint64_t> out;
  for (const auto& [bin, b] : histogram_) out[bin] = b.count;
  return out;
}

std::map<int, double> RacebotController::count_ewmas() const
{
  std::map<int, double> out;
  for (const auto& [bin, b] : histogram_) out[bin] = b.ewma;
  return out;
}

ControllerStep RacebotController::step(double mcs_ewma, double t_step_s)
{
  ControllerStep out;
  timer_s_ += t_step_s;

  if (timer_s_ > params_.t_update_s) {
    timer_s_ = 0.0;
    out.periodic_fired = true;

    // Fold this period's counts into the per-bin EWMAs, then rebuild the
    // goal from scratch: walk bins in ascending RSSI order and keep the
    // highest level whose activity clears the count threshold, margined on
    // both sides (above the interferer, below the beacon).
    for (auto& [bin, b] : histogram_) {
      b.ewma = ofc_ewma_update(b.ewma, static_cast<double>(b.count), params_.alpha);
    }
    goal_ = kGoalFloorDbm;
    if (beacon_seen_) {
      for (const auto& [bin, b] : histogram_) {
        const double bin_rssi = bin * params_.bin_width_db;
        if (b.ewma > params_.ofc_thr && bin_rssi > goal_) {
          goal_ = std::min(bin_rssi + params_.margin_db,
                           beacon_ewma_ - params_.margin_db);
        }
      }
    }
    for (auto& [bin, b] : histogram_) b.count = 0;
  }

  const bool mcs_dropped = beacon_seen_ && mcs_prev_ * params_.gamma > mcs_ewma;
  if (mcs_dropped) {
    // Average MCS fell by more than the tolerated fraction: back the
    // threshold off toward the beacon level to recover transmit power. The
    // averaging can move the threshold up when the beacon is strong; that is
    // the formula as defined, so it is only tagged, not reinterpreted.
    const double v = std::max((obss_pd_ + beacon_ewma_ - params_.margin_db) / 2.0,
                              bounds_.min_dbm);
    goal_ = (v + goal_) / 2.0;
    out.branch = v > obss_pd_ ? RacebotBranch::DropRaised : RacebotBranch::Drop;
    set_threshold(std::min(v, bounds_.max_dbm));
  } else {
    // Move halfway to the goal. The formula's min() only guards the upper
    // bound; the goal floor can pull the average below the lower bound, so
    // clamp that side too.
    out.branch = RacebotBranch::NoDrop;
    const double v = std::min((obss_pd_ + goal_) / 2.0, bounds_.max_dbm);
    set_threshold(std::max(v, bounds_.min_dbm));
  }
  mcs_prev_ = mcs_ewma;

  out.obss_pd_dbm = obss_pd_;
  out.txpow_dbm = txpow_;
  out.goal_dbm = goal_;
  out.has_goal = true;
  return out;
}

DscController::DscController(const ObssPdBounds& bounds, DscParams params)
    : ThresholdController(bounds), params_(params)
{
}

ControllerStep DscController::step(double, double)
{
  if (!beacon_seen_) return hold();
  set_threshold(std::clamp(beacon_ewma_ - params_.margin_db, bounds_.min_dbm,
                           bounds_.max_dbm));
  return hold();
}

RtotController::RtotController(const ObssPdBounds& bounds, RtotParams params)
    : ThresholdController(bounds), params_(params)
{
}

ControllerStep RtotController::step(double, double)
{
  if (!beacon_seen_) return hold();
  set_threshold(std::clamp(beacon_ewma_ - params_.offset_db, bounds_.min_dbm,
                           bounds_.max_dbm));
  return hold();
}

NoObssPdController::NoObssPdController(const ObssPdBounds& bounds)
    : ThresholdController(bounds)
{
}

ControllerStep NoObssPdController::step(double, double) { return hold(); }

FixedController::FixedController(const ObssPdBounds& bounds, double obss_pd_dbm)
    : ThresholdController(bounds)
{
  set_threshold(std::clamp(obss_pd_dbm, bounds.min_dbm, bounds.max_dbm));
}

ControllerStep FixedController::step(double, double) { return hold(); }

std::unique_ptr<ThresholdController> make_controller(const ControllerConfig& cfg,
                                                     const ObssPdBounds& bounds)
{
  switch (cfg.kind) {
    case ControllerKind::Racebot:
      return std::make_unique<RacebotController>(bounds, cfg.racebot);
    case ControllerKind::Dsc: return std::make_unique<DscController>(bounds, cfg.dsc);
    case ControllerKind::Rtot: return std::make_unique<RtotController>(bounds, cfg.rtot);
    case ControllerKind::NoObssPd: return std::make_unique<NoObssPdController>(bounds);
    case ControllerKind::Fixed:
      return std::make_unique<FixedController>(bounds, cfg.fixed_obss_pd_dbm);
  }
  throw std::logic_error("unknown controller kind");
}

} // namespace srsim
