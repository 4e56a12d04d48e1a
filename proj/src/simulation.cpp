#include "srsim/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "srsim/errors.hpp"

namespace srsim {

Simulation::Simulation(const ScenarioSpec& spec)
    : spec_(spec), bounds_(ObssPdBounds::for_bandwidth_mhz(spec.bandwidth_mhz))
{
  spec_.validate();
  horizon_us_ = seconds_to_micros(spec_.horizon_s);
  step_us_ = seconds_to_micros(spec_.t_step_s);

  const auto inits = scenario_nodes(spec_);
  std::vector<Position> positions;
  std::vector<int> colors;
  for (const auto& ni : inits) {
    positions.push_back(ni.pos);
    colors.push_back(ni.color);
  }
  medium_ = std::make_unique<Medium>(std::move(positions), std::move(colors),
                                     spec_.phy, &spec_.mcs_table);

  RngRoot root(spec_.seed);
  nodes_.reserve(inits.size());
  for (const auto& ni : inits) {
    NodeCtx n;
    n.init = ni;
    n.controller = make_controller(ni.controller, bounds_);
    n.obss_pd = n.controller->obss_pd();
    n.txpow = n.controller->txpow();
    n.selector = make_selector(spec_.rate, &spec_.mcs_table, spec_.minstrel,
                               spec_.thompson);
    n.mcs_ewma = McsEwma(spec_.racebot.alpha);
    n.backoff_rng = root.stream("backoff", static_cast<std::uint64_t>(ni.id));
    n.traffic_rng = root.stream("traffic", static_cast<std::uint64_t>(ni.id));
    n.rate_rng = root.stream("rate-selection", static_cast<std::uint64_t>(ni.id));
    nodes_.push_back(std::move(n));
  }
  for (auto& n : nodes_) {
    n.mac = std::make_unique<MacEntity>(n.init.id, n.init.ap, spec_.mac,
                                        &spec_.mcs_table, this);
  }
  ledger_ = MetricsLedger(static_cast<int>(nodes_.size()), spec_.t_step_s);
}

RunResult Simulation::run(const RunOptions& opts)
{
  record_frames_ = opts.record_frames;
  probe_ = opts.racebot_probe;

  // Seed the initial events. Relative order at equal timestamps follows
  // insertion, so the step boundary flushes metrics before anything else
  // that lands on the same microsecond.
  queue_.schedule(step_us_, SimEvent{SimEvent::Kind::StepBoundary, 0, {}, 0});
  if (spec_.rate == RateKind::Minstrel) {
    queue_.schedule(spec_.minstrel.fold_interval_us,
                    SimEvent{SimEvent::Kind::MinstrelFold, 0, {}, 0});
  }
  for (auto& n : nodes_) {
    if (n.init.kind == NodeKind::Ap) {
      queue_.schedule(0, SimEvent{SimEvent::Kind::BeaconTick, n.init.id, {}, 0});
    } else if (n.init.offered_rate_mbps > 0.0) {
      const Micros gap = next_arrival_delta_us(
          n.init.offered_rate_mbps, spec_.traffic.payload_bytes, n.traffic_rng);
      queue_.schedule(gap, SimEvent{SimEvent::Kind::TrafficArrival, n.init.id, {}, 0});
    }
  }

  while (auto e = queue_.pop(horizon_us_)) {
    dispatch(e->payload);
  }
  queue_.advance_to(horizon_us_);

  // Close the final metrics window and take the last controller step at the
  // horizon itself (its step event is at the horizon and never dispatches).
  ledger_.flush_step();
  controller_step(horizon_us_);

  RunResult out;
  out.ledger = std::move(ledger_);
  out.frames = std::move(log_);
  out.trace = std::move(trace_);
  for (const auto& n : nodes_) {
    stats_.queue_drops += n.mac->queue_drops();
    stats_.retry_drops += n.mac->retry_drops();
  }
  out.stats = stats_;
  out.log_success_bytes = log_success_bytes_;
  return out;
}

void Simulation::dispatch(const SimEvent& e)
{
  switch (e.kind) {
    case SimEvent::Kind::TrafficArrival: on_arrival(e.node); break;
    case SimEvent::Kind::MacTimer: nodes_[static_cast<std::size_t>(e.node)].mac->on_timer(e.timer); break;
    case SimEvent::Kind::FrameEnd: on_frame_end(e.frame_id); break;
    case SimEvent::Kind::BeaconTick: {
      auto& n = nodes_[static_cast<std::size_t>(e.node)];
      n.mac->enqueue_beacon();
      queue_.schedule(queue_.now() + spec_.mac.beacon_interval_us,
                      SimEvent{SimEvent::Kind::BeaconTick, e.node, {}, 0});
      break;
    }
    case SimEvent::Kind::StepBoundary: {
      ledger_.flush_step();
      controller_step(queue_.now());
      queue_.schedule(queue_.now() + step_us_,
                      SimEvent{SimEvent::Kind::StepBoundary, 0, {}, 0});
      break;
    }
    case SimEvent::Kind::MinstrelFold: {
      for (auto& n : nodes_) n.selector->periodic_fold();
      queue_.schedule(queue_.now() + spec_.minstrel.fold_interval_us,
                      SimEvent{SimEvent::Kind::MinstrelFold, 0, {}, 0});
      break;
    }
  }
}

void Simulation::on_arrival(int node)
{
  auto& n = nodes_[static_cast<std::size_t>(node)];
  stats_.arrivals += 1;
  n.mac->enqueue_data(spec_.traffic.payload_bytes);
  const Micros gap = next_arrival_delta_us(n.init.offered_rate_mbps,
                                           spec_.traffic.payload_bytes, n.traffic_rng);
  queue_.schedule(queue_.now() + gap,
                  SimEvent{SimEvent::Kind::TrafficArrival, node, {}, 0});
}

void Simulation::record_heard_frame(int node, const Frame& f, double rssi)
{
  auto& n = nodes_[static_cast<std::size_t>(node)];
  if (f.color == n.init.color) {
    if (f.kind == FrameKind::Beacon && n.init.kind == NodeKind::Sta &&
        f.src == n.init.ap) {
      n.controller->observe_beacon(rssi);
    } else if (f.kind == FrameKind::Data && n.init.kind == NodeKind::Ap &&
               f.dst == n.init.id) {
      // APs hear no beacons of their own; uplink data from associated
      // stations serves as their link-quality reference instead.
      n.controller->observe_beacon(rssi);
    }
  } else {
    n.controller->observe_obss(rssi);
  }
}

std::uint64_t Simulation::begin_frame(int node, FrameKind kind, int dst, int mcs,
                                      std::uint32_t payload_bytes, double txpow_dbm,
                                      std::uint64_t ack_for)
{
  const std::uint32_t on_air_bytes =
      kind == FrameKind::Data ? payload_bytes + spec_.mac.mac_header_bytes
                              : payload_bytes;
  const Micros air = frame_airtime_us(on_air_bytes, spec_.mcs_table.at(mcs).rate_mbps,
                                      spec_.mac.preamble_us);

  Frame f;
  f.id = next_frame_id_++;
  f.kind = kind;
  f.src = node;
  f.dst = dst;
  f.color = nodes_[static_cast<std::size_t>(node)].init.color;
  f.mcs = mcs;
  f.txpow_dbm = txpow_dbm;
  f.payload_bytes = payload_bytes;
  f.start = queue_.now();
  f.end = queue_.now() + air;
  f.ack_for = ack_for;

  medium_->frame_started(f);
  inflight_.emplace(f.id, f);
  queue_.schedule(f.end, SimEvent{SimEvent::Kind::FrameEnd, node, {}, f.id});

  switch (kind) {
    case FrameKind::Data: stats_.data_frames += 1; break;
    case FrameKind::Ack: stats_.acks_sent += 1; break;
    case FrameKind::Beacon: stats_.beacons_sent += 1; break;
  }

  // Preamble-decodable listeners record the frame (controller observations),
  // then everyone re-evaluates the channel.
  for (auto& n : nodes_) {
    if (n.init.id == f.src) continue;
    const double rssi = medium_->frame_rssi_dbm(f.id, n.init.id);
    if (rssi >= spec_.phy.preamble_detection_dbm) record_heard_frame(n.init.id, f, rssi);
  }
  notify_all_medium_changed();
  return f.id;
}

void Simulation::on_frame_end(std::uint64_t frame_id)
{
  const auto it = inflight_.find(frame_id);
  if (it == inflight_.end()) throw std::logic_error("frame end without frame");
  const Frame f = it->second;
  inflight_.erase(it);

  const Medium::EndResult r = medium_->frame_ended(f);

  if (record_frames_) log_.push_back(FrameRecord{f, r.outcome});

  if (f.kind == FrameKind::Data) {
    if (r.outcome == FrameOutcome::Success) {
      stats_.data_success += 1;
      log_success_bytes_ += f.payload_bytes;
      ledger_.count_rx(f.dst, f.payload_bytes);
      nodes_[static_cast<std::size_t>(f.dst)].mac->request_ack(f.id, f.src);
    } else {
      stats_.data_corrupted += 1;
    }
  } else if (f.kind == FrameKind::Ack && r.outcome == FrameOutcome::Success) {
    auto& dst = nodes_[static_cast<std::size_t>(f.dst)];
    if (dst.mac->awaiting_frame() == f.ack_for && f.ack_for != 0) {
      dst.mac->on_ack_verdict(true);
    }
  }

  nodes_[static_cast<std::size_t>(f.src)].mac->on_own_frame_ended(f);
  notify_all_medium_changed();
}

void Simulation::controller_step(Micros at)
{
  for (auto& n : nodes_) {
    const double mcs_now = n.mcs_ewma.value();

    if (probe_ && n.controller->kind() == ControllerKind::Racebot) {
      auto* rc = static_cast<RacebotController*>(n.controller.get());
      RacebotStepInputs in;
      in.t_us = at;
      in.node = n.init.id;
      in.period_counts = rc->period_counts();
      in.beacon_ewma = rc->beacon_ewma();
      in.beacon_seen = rc->beacon_seen();
      in.mcs_ewma = mcs_now;
      in.t_step_s = spec_.t_step_s;
      probe_(in);
    }

    const ControllerStep s = n.controller->step(mcs_now, spec_.t_step_s);
    n.obss_pd = s.obss_pd_dbm;
    n.txpow = s.txpow_dbm;
    check_threshold_invariants(n);

    TraceRow row;
    row.t_us = at;
    row.node = n.init.id;
    row.obss_pd_dbm = s.obss_pd_dbm;
    row.goal_dbm = s.goal_dbm;
    row.has_goal = s.has_goal;
    row.txpow_dbm = s.txpow_dbm;
    row.mcs_ewma = mcs_now;
    row.branch = s.branch;
    row.periodic_fired = s.periodic_fired;
    trace_.push_back(row);
  }
  // Threshold changes can flip carrier-sense verdicts for ongoing frames.
  notify_all_medium_changed();
}

void Simulation::check_threshold_invariants(const NodeCtx& n) const
{
  if (n.obss_pd < bounds_.min_dbm || n.obss_pd > bounds_.max_dbm)
    throw InvariantError("controller left obss_pd outside the bandwidth bounds");
  if (n.txpow + n.obss_pd != bounds_.txpow_ref_dbm + bounds_.min_dbm)
    throw InvariantError("threshold/txpower coupling broken");
}

void Simulation::notify_all_medium_changed()
{
  for (auto& n : nodes_) n.mac->on_medium_changed();
}

Micros Simulation::now() const { return queue_.now(); }

EventHandle Simulation::schedule_timer(int node, MacTimer t, Micros at)
{
  return queue_.schedule(at, SimEvent{SimEvent::Kind::MacTimer, node, t, 0});
}

void Simulation::cancel_timer(EventHandle& h) { queue_.cancel(h); }

bool Simulation::channel_idle(int node) const
{
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  return !medium_->channel_busy(node, n.obss_pd, queue_.now());
}

std::uint64_t Simulation::backoff_draw(int node, std::uint64_t hi)
{
  return nodes_[static_cast<std::size_t>(node)].backoff_rng.uniform_int(0, hi);
}

int Simulation::choose_mcs(int node)
{
  auto& n = nodes_[static_cast<std::size_t>(node)];
  const int mcs = n.selector->pick(n.rate_rng);
  n.mcs_ewma.record(mcs);
  return mcs;
}

void Simulation::rate_feedback(int node, int mcs, bool success)
{
  nodes_[static_cast<std::size_t>(node)].selector->update(mcs, success);
}

double Simulation::node_txpow(int node) const
{
  return nodes_[static_cast<std::size_t>(node)].txpow;
}

double Simulation::beacon_txpow(int) const { return bounds_.txpow_ref_dbm; }

const char* to_string(FrameKind k)
{
  switch (k) {
    case FrameKind::Data: return "data";
    case FrameKind::Ack: return "ack";
    case FrameKind::Beacon: return "beacon";
  }
  return "?";
}

const char* to_string(FrameOutcome o)
{
  switch (o) {
    case FrameOutcome::None: return "-";
    case FrameOutcome::Pending: return "pending";
    case FrameOutcome::Success: return "success";
    case FrameOutcome::Corrupted: return "corrupted";
  }
  return "?";
}

void write_event_log(std::ostream& out, const std::vector<FrameRecord>& frames)
{
  char buf[48];
  out << "start_us,end_us,src,dst,color,mcs,txpow_dbm,outcome,kind,bytes\n";
  for (const auto& fr : frames) {
    const Frame& f = fr.frame;
    std::snprintf(buf, sizeof buf, "%.10g", f.txpow_dbm);
    out << f.start << ',' << f.end << ',' << f.src << ',' << f.dst << ',' << f.color
        << ',' << f.mcs << ',' << buf << ',' << to_string(fr.outcome) << ','
        << to_string(f.kind) << ',' << f.payload_bytes << '\n';
  }
}

void write_controller_trace(std::ostream& out, const std::vector<TraceRow>& rows)
{
  char pd[48];
  char goal[48];
  char tx[48];
  char mcs[48];
  out << "t_us,node,obss_pd_dbm,goal_dbm,txpow_dbm,mcs_ewma,branch,periodic\n";
  for (const auto& r : rows) {
    std::snprintf(pd, sizeof pd, "%.10g", r.obss_pd_dbm);
    if (r.has_goal) {
      std::snprintf(goal, sizeof goal, "%.10g", r.goal_dbm);
    } else {
      goal[0] = '\0';
    }
    std::snprintf(tx, sizeof tx, "%.10g", r.txpow_dbm);
    std::snprintf(mcs, sizeof mcs, "%.10g", r.mcs_ewma);
    out << r.t_us << ',' << r.node << ',' << pd << ',' << goal << ',' << tx << ','
        << mcs << ',' << to_string(r.branch) << ',' << (r.periodic_fired ? 1 : 0)
        << '\n';
  }
}

} // namespace srsim
