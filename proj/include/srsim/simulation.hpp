#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "srsim/controllers.hpp"
#include "srsim/event_queue.hpp"
#include "srsim/mac.hpp"
#include "srsim/medium.hpp"
#include "srsim/metrics.hpp"
#include "srsim/rate_select.hpp"
#include "srsim/scenario.hpp"

namespace srsim {

/// One completed frame, as written to the event log.
struct FrameRecord {
  Frame frame;
  FrameOutcome outcome = FrameOutcome::None;
};

/// One controller-trace row, one per node per step.
struct TraceRow {
  Micros t_us = 0;
  int node = 0;
  double obss_pd_dbm = 0.0;
  double goal_dbm = 0.0;
  bool has_goal = false;
  double txpow_dbm = 0.0;
  double mcs_ewma = 0.0;
  RacebotBranch branch = RacebotBranch::None;
  bool periodic_fired = false;
};

/// Controller inputs captured immediately before a step; lets an external
/// replay drive the same update rules over the same observations.
struct RacebotStepInputs {
  Micros t_us = 0;
  int node = 0;
  std::map<int, std::uint64_t> period_counts;
  double beacon_ewma = 0.0;
  bool beacon_seen = false;
  double mcs_ewma = 0.0;
  double t_step_s = 0.0;
};

struct RunStats {
  std::uint64_t data_frames = 0;
  std::uint64_t data_success = 0;
  std::uint64_t data_corrupted = 0;
  std::uint64_t acks_sent = 0;
  std::uint64_t beacons_sent = 0;
  std::uint64_t queue_drops = 0;
  std::uint64_t retry_drops = 0;
  std::uint64_t arrivals = 0;
};

struct RunResult {
  MetricsLedger ledger;
  std::vector<FrameRecord> frames; // empty unless recording was requested
  std::vector<TraceRow> trace;
  RunStats stats;
  std::uint64_t log_success_bytes = 0; // independent byte total over the event log
};

struct RunOptions {
  bool record_frames = true;
  std::function<void(const RacebotStepInputs&)> racebot_probe;
};

/// Single-threaded discrete-event run of one scenario. Separate Simulation
/// instances share nothing and may run on different threads.
class Simulation : public MacHost {
 public:
  explicit Simulation(const ScenarioSpec& spec);

  RunResult run(const RunOptions& opts = {});

  // MacHost
  Micros now() const override;
  EventHandle schedule_timer(int node, MacTimer t, Micros at) override;
  void cancel_timer(EventHandle& h) override;
  bool channel_idle(int node) const override;
  std::uint64_t backoff_draw(int node, std::uint64_t hi) override;
  int choose_mcs(int node) override;
  void rate_feedback(int node, int mcs, bool success) override;
  std::uint64_t begin_frame(int node, FrameKind kind, int dst, int mcs,
                            std::uint32_t payload_bytes, double txpow_dbm,
                            std::uint64_t ack_for) override;
  double node_txpow(int node) const override;
  double beacon_txpow(int node) const override;

 private:
  struct SimEvent {
    enum class Kind : std::uint8_t {
      TrafficArrival,
      MacTimer,
      FrameEnd,
      BeaconTick,
      StepBoundary,
      MinstrelFold,
    };
    Kind kind = Kind::TrafficArrival;
    int node = 0;
    MacTimer timer = MacTimer::DifsDone;
    std::uint64_t frame_id = 0;
  };

  struct NodeCtx {
    NodeInit init;
    double obss_pd = 0.0;
    double txpow = 0.0;
    std::unique_ptr<ThresholdController> controller;
    std::unique_ptr<RateSelector> selector;
    McsEwma mcs_ewma{0.5};
    std::unique_ptr<MacEntity> mac;
    RngStream backoff_rng;
    RngStream traffic_rng;
    RngStream rate_rng;
  };

  void dispatch(const SimEvent& e);
  void on_arrival(int node);
  void on_frame_end(std::uint64_t frame_id);
  void record_heard_frame(int node, const Frame& f, double rssi);
  void controller_step(Micros at);
  void notify_all_medium_changed();
  void check_threshold_invariants(const NodeCtx& n) const;

  ScenarioSpec spec_;
  ObssPdBounds bounds_;
  Micros horizon_us_ = 0;
  Micros step_us_ = 0;

  EventQueue<SimEvent> queue_;
  std::unique_ptr<Medium> medium_;
  std::vector<NodeCtx> nodes_;
  MetricsLedger ledger_;

  std::vector<FrameRecord> log_;
  std::vector<TraceRow> trace_;
  RunStats stats_;
  std::uint64_t log_success_bytes_ = 0;

  std::uint64_t next_frame_id_ = 1;
  std::map<std::uint64_t, Frame> inflight_;

  bool record_frames_ = true;
  std::function<void(const RacebotStepInputs&)> probe_;
};

const char* to_string(FrameKind k);
const char* to_string(FrameOutcome o);

/// Event-log text: one frame per line,
/// start_us,end_us,src,dst,color,mcs,txpow_dbm,outcome,kind,bytes.
void write_event_log(std::ostream& out, const std::vector<FrameRecord>& frames);

/// Controller-trace text:
/// t_us,node,obss_pd_dbm,goal_dbm,txpow_dbm,mcs_ewma,branch,periodic.
void write_controller_trace(std::ostream& out, const std::vector<TraceRow>& rows);

} // namespace srsim
