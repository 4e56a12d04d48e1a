#include "srsim/mac.hpp"

#include <algorithm>
#include <cmath>

namespace srsim {

int next_cw_after_failure(int cw, const DcfParams& p)
{
  return std::min(2 * (cw + 1) - 1, p.cw_max);
}

Micros frame_airtime_us(std::uint32_t frame_bytes, double rate_mbps, Micros preamble_us)
{
  const double bits = 8.0 * static_cast<double>(frame_bytes);
  return preamble_us + static_cast<Micros>(std::ceil(bits / rate_mbps));
}

const char* to_string(MacPhase p)
{
  switch (p) {
    case MacPhase::Idle: return "idle";
    case MacPhase::Deferring: return "deferring";
    case MacPhase::WaitingDifs: return "waiting-difs";
    case MacPhase::Backoff: return "backoff";
    case MacPhase::Transmitting: return "transmitting";
    case MacPhase::AwaitingAck: return "awaiting-ack";
  }
  return "?";
}

MacEntity::MacEntity(int node_id, int ap_id, DcfParams params, const McsTable* mcs,
                     MacHost* host)
    : node_(node_id), ap_(ap_id), p_(params), mcs_(mcs), host_(host), cw_(params.cw_min)
{
}

bool MacEntity::enqueue_data(std::uint32_t bytes)
{
  if (data_queued_ >= static_cast<std::size_t>(p_.queue_cap)) {
    queue_drops_ += 1;
    return false;
  }
  queue_.push_back(PendingItem{false, bytes});
  data_queued_ += 1;
  // With items already queued the access procedure is engaged (or deferring
  // on a busy channel); only an empty->nonempty transition starts it.
  if (queue_.size() == 1) kick();
  return true;
}

void MacEntity::enqueue_beacon()
{
  queue_.push_back(PendingItem{true, p_.beacon_bytes});
  if (queue_.size() == 1) kick();
}

void MacEntity::on_medium_changed() { kick(); }

void MacEntity::pop_front_item()
{
  if (!queue_.front().beacon) data_queued_ -= 1;
  queue_.pop_front();
}

void MacEntity::cancel_access_timers()
{
  host_->cancel_timer(difs_h_);
  host_->cancel_timer(txstart_h_);
}

void MacEntity::kick()
{
  if (phase_ == MacPhase::Transmitting || phase_ == MacPhase::AwaitingAck) return;
  if (queue_.empty()) {
    cancel_access_timers();
    phase_ = MacPhase::Idle;
    return;
  }
  if (!host_->channel_idle(node_)) {
    // Suspension discards the countdown; a fresh draw from the unchanged
    // window happens after the next idle DIFS. Slots only ever decrement
    // while the node considers the channel idle.
    slots_.reset();
    cancel_access_timers();
    phase_ = MacPhase::Deferring;
    return;
  }
  if (phase_ == MacPhase::Idle || phase_ == MacPhase::Deferring) {
    phase_ = MacPhase::WaitingDifs;
    difs_h_ = host_->schedule_timer(node_, MacTimer::DifsDone,
                                    host_->now() + p_.difs_us);
  }
  // WaitingDifs / Backoff with the channel still idle: timers keep running.
}

void MacEntity::on_timer(MacTimer t)
{
  switch (t) {
    case MacTimer::DifsDone: {
      difs_h_.clear();
      // A busy transition would have cancelled this timer, so the channel
      // was idle for the whole DIFS.
      slots_ = static_cast<std::int64_t>(
          host_->backoff_draw(node_, static_cast<std::uint64_t>(cw_)));
      phase_ = MacPhase::Backoff;
      txstart_h_ = host_->schedule_timer(node_, MacTimer::TxStart,
                                         host_->now() + *slots_ * p_.slot_us);
      break;
    }
    case MacTimer::TxStart: {
      txstart_h_.clear();
      if (!host_->channel_idle(node_)) {
        // Lost a same-instant race: a competing frame started on this very
        // microsecond. Defer and contend again.
        slots_.reset();
        phase_ = MacPhase::Deferring;
        break;
      }
      start_transmission();
      break;
    }
    case MacTimer::AckTimeout: {
      acktimeout_h_.clear();
      on_ack_verdict(false);
      break;
    }
    case MacTimer::AckTx: {
      acktx_h_.clear();
      if (phase_ == MacPhase::Transmitting || phase_ == MacPhase::AwaitingAck) {
        break; // half-duplex conflict: the ACK is lost
      }
      slots_.reset();
      cancel_access_timers();
      in_ack_tx_ = true;
      // Phase changes first: starting the frame re-notifies every node,
      // including this one.
      phase_ = MacPhase::Transmitting;
      host_->begin_frame(node_, FrameKind::Ack, ack_dst_, 0, p_.ack_bytes,
                         host_->node_txpow(node_), ack_for_);
      break;
    }
  }
}

void MacEntity::start_transmission()
{
  slots_.reset();
  phase_ = MacPhase::Transmitting;
  const PendingItem& item = queue_.front();
  if (item.beacon) {
    attempt_mcs_ = -1;
    attempt_frame_ = host_->begin_frame(node_, FrameKind::Beacon, -1, 0, item.bytes,
                                        host_->beacon_txpow(node_), 0);
  } else {
    attempt_mcs_ = host_->choose_mcs(node_);
    attempt_frame_ = host_->begin_frame(node_, FrameKind::Data, ap_, attempt_mcs_,
                                        item.bytes, host_->node_txpow(node_), 0);
  }
}

void MacEntity::on_own_frame_ended(const Frame& f)
{
  if (in_ack_tx_) {
    in_ack_tx_ = false;
    phase_ = MacPhase::Idle;
    kick();
    return;
  }
  if (f.kind == FrameKind::Data) {
    phase_ = MacPhase::AwaitingAck;
    const Micros ack_air =
        frame_airtime_us(p_.ack_bytes, mcs_->at(0).rate_mbps, p_.preamble_us);
    acktimeout_h_ = host_->schedule_timer(
        node_, MacTimer::AckTimeout,
        host_->now() + p_.sifs_us + ack_air + 2 * p_.slot_us);
  } else { // Beacon
    pop_front_item();
    phase_ = MacPhase::Idle;
    kick();
  }
}

void MacEntity::on_ack_verdict(bool success)
{
  host_->cancel_timer(acktimeout_h_);
  host_->rate_feedback(node_, attempt_mcs_, success);
  if (success) {
    cw_ = p_.cw_min;
    retry_ = 0;
    pop_front_item();
  } else {
    retry_ += 1;
    if (retry_ > p_.retry_limit) {
      pop_front_item();
      retry_ = 0;
      cw_ = p_.cw_min;
      retry_drops_ += 1;
    } else {
      cw_ = next_cw_after_failure(cw_, p_);
    }
  }
  attempt_mcs_ = -1;
  attempt_frame_ = 0;
  phase_ = MacPhase::Idle;
  kick();
}

void MacEntity::request_ack(std::uint64_t data_frame_id, int data_src)
{
  ack_for_ = data_frame_id;
  ack_dst_ = data_src;
  acktx_h_ = host_->schedule_timer(node_, MacTimer::AckTx,
                                   host_->now() + p_.sifs_us);
}

} // namespace srsim
