#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace srsim {

/// Per-bandwidth limits on the OBSS/PD threshold and the reference transmit
/// power. For every bandwidth the dBm sum txpow_ref + min is the same
/// constant, which the threshold/power coupling preserves.
struct ObssPdBounds {
  double min_dbm = -82.0;
  double max_dbm = -62.0;
  double txpow_ref_dbm = 21.0;

  static ObssPdBounds for_bandwidth_mhz(int mhz);
};

/// Threshold/power coupling: raising the threshold lowers transmit power by
/// the same amount. Input must already be clamped into the bounds.
double txpow_from_threshold(double obss_pd_dbm, const ObssPdBounds& bounds);

/// One EWMA step: alpha*count + (1-alpha)*prev.
double ofc_ewma_update(double prev, double count, double alpha);

enum class ControllerKind { Racebot, Dsc, Rtot, NoObssPd, Fixed };

const char* to_string(ControllerKind k);
std::optional<ControllerKind> controller_kind_from_string(const std::string& s);

struct RacebotParams {
  double margin_db = 5.0;   // M
  double gamma = 0.7;       // tolerated fractional MCS-average drop
  double alpha = 0.5;       // EWMA weight, shared by counts / beacon / MCS
  double t_update_s = 1.0;  // period of the goal recomputation
  double ofc_thr = 10.0;    // frame-count EWMA needed for a bin to matter
  double bin_width_db = 1.0;
};

struct DscParams {
  double margin_db = 20.0;
};

struct RtotParams {
  double offset_db = 10.0; // headroom kept below the beacon level
};

enum class RacebotBranch { None, NoDrop, Drop, DropRaised };

const char* to_string(RacebotBranch b);

struct ControllerStep {
  double obss_pd_dbm = 0.0;
  double txpow_dbm = 0.0;
  double goal_dbm = 0.0;
  bool has_goal = false;
  RacebotBranch branch = RacebotBranch::None;
  bool periodic_fired = false;
};

/// A per-node spatial-reuse threshold controller. Observations arrive from
/// the MAC as frames are heard; `step` runs once per metrics step and
/// returns the new threshold/power pair.
class ThresholdController {
 public:
  explicit ThresholdController(const ObssPdBounds& bounds);
  virtual ~ThresholdController() = default;

  virtual ControllerKind kind() const = 0;
  virtual void observe_obss(double rssi_dbm) { (void)rssi_dbm; }
  virtual void observe_beacon(double rssi_dbm);
  virtual ControllerStep step(double mcs_ewma, double t_step_s) = 0;

  double obss_pd() const { return obss_pd_; }
  double txpow() const { return txpow_; }
  const ObssPdBounds& bounds() const { return bounds_; }
  bool beacon_seen() const { return beacon_seen_; }
  double beacon_ewma() const { return beacon_ewma_; }

 protected:
  void set_threshold(double obss_pd_dbm); // also rederives txpow
  ControllerStep hold() const;            // step result that keeps the state

  ObssPdBounds bounds_;
  double obss_pd_;
  double txpow_;
  double beacon_alpha_ = 0.5;
  double beacon_ewma_ = 0.0;
  bool beacon_seen_ = false;
};

/// Dynamic threshold controller: track inter-BSS RSSI levels with per-level
/// frame counts, periodically derive a goal threshold from the busiest
/// levels, then move toward the goal in halving steps while watching the
/// average MCS for drops caused by the coupled power reduction.
class RacebotController : public ThresholdController {
 public:
  RacebotController(const ObssPdBounds& bounds, RacebotParams params);

  ControllerKind kind() const override { return ControllerKind::Racebot; }
  void observe_obss(double rssi_dbm) override;
  ControllerStep step(double mcs_ewma, double t_step_s) override;

  double goal() const { return goal_; }
  double timer_s() const { return timer_s_; }
  double mcs_ewma_prev() const { return mcs_prev_; }
  const RacebotParams& params() const { return params_; }

  /// Resume from a checkpointed threshold/goal pair.
  void restore(double obss_pd_dbm, double goal_dbm);

  /// Period counts per bin accumulated since the last goal recomputation,
  /// keyed by bin index (bin * bin_width gives the bin's RSSI in dBm).
  std::map<int, std::uint64_t> period_counts() const;
  std::map<int, double> count_ewmas() const;

  static constexpr double kGoalFloorDbm = -101.0;

 private:
  struct Bin {
    std::uint64_t count = 0; // current period
    double ewma = 0.0;
  };

  RacebotParams params_;
  std::map<int, Bin> histogram_;
  double goal_ = kGoalFloorDbm;
  double timer_s_ = 0.0;
  double mcs_prev_ = 0.0;
};

/// Baseline: threshold pinned at `beacon - margin`, clamped to the bounds.
class DscController : public ThresholdController {
 public:
  DscController(const ObssPdBounds& bounds, DscParams params);
  ControllerKind kind() const override { return ControllerKind::Dsc; }
  ControllerStep step(double mcs_ewma, double t_step_s) override;

 private:
  DscParams params_;
};

/// Baseline: threshold pinned at `beacon - offset`, clamped to the bounds.
class RtotController : public ThresholdController {
 public:
  RtotController(const ObssPdBounds& bounds, RtotParams params);
  ControllerKind kind() const override { return ControllerKind::Rtot; }
  ControllerStep step(double mcs_ewma, double t_step_s) override;

 private:
  RtotParams params_;
};

/// No spatial reuse: threshold parked at the lower bound, power at the
/// reference level, forever.
class NoObssPdController : public ThresholdController {
 public:
  explicit NoObssPdController(const ObssPdBounds& bounds);
  ControllerKind kind() const override { return ControllerKind::NoObssPd; }
  ControllerStep step(double mcs_ewma, double t_step_s) override;
};

/// Constant threshold (power still coupled); used for pinned-threshold
/// experiments.
class FixedController : public ThresholdController {
 public:
  FixedController(const ObssPdBounds& bounds, double obss_pd_dbm);
  ControllerKind kind() const override { return ControllerKind::Fixed; }
  ControllerStep step(double mcs_ewma, double t_step_s) override;
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::Racebot;
  RacebotParams racebot;
  DscParams dsc;
  RtotParams rtot;
  double fixed_obss_pd_dbm = -82.0;
};

std::unique_ptr<ThresholdController> make_controller(const ControllerConfig& cfg,
                                                     const ObssPdBounds& bounds);

} // namespace srsim
