#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "srsim/event_queue.hpp"
#include "srsim/mcs.hpp"
#include "srsim/medium.hpp"
#include "srsim/units.hpp"

namespace srsim {

struct DcfParams {
  Micros slot_us = 9;
  Micros sifs_us = 16;
  Micros difs_us = 34;
  int cw_min = 15;
  int cw_max = 1023;
  int retry_limit = 7;
  std::uint32_t mac_header_bytes = 34;
  std::uint32_t ack_bytes = 14;
  std::uint32_t beacon_bytes = 80;
  Micros preamble_us = 40;
  Micros beacon_interval_us = 102'400;
  int queue_cap = 100; // pending data payloads per node
};

/// Binary exponential backoff: CW -> min(2*(CW+1)-1, CWmax).
int next_cw_after_failure(int cw, const DcfParams& p);

/// On-air time of a frame: PHY preamble plus payload bits at the MCS rate
/// (Mbps == bits per microsecond), rounded up to whole microseconds.
Micros frame_airtime_us(std::uint32_t frame_bytes, double rate_mbps, Micros preamble_us);

enum class MacPhase { Idle, Deferring, WaitingDifs, Backoff, Transmitting, AwaitingAck };

const char* to_string(MacPhase p);

enum class MacTimer { DifsDone, TxStart, AckTimeout, AckTx };

/// Services the MAC needs from the surrounding simulation: the clock,
/// timers, carrier sense, rate selection and frame emission.
class MacHost {
 public:
  virtual ~MacHost() = default;
  virtual Micros now() const = 0;
  virtual EventHandle schedule_timer(int node, MacTimer t, Micros at) = 0;
  virtual void cancel_timer(EventHandle& h) = 0;
  virtual bool channel_idle(int node) const = 0;
  virtual std::uint64_t backoff_draw(int node, std::uint64_t hi) = 0;
  virtual int choose_mcs(int node) = 0;
  virtual void rate_feedback(int node, int mcs, bool success) = 0;
  virtual std::uint64_t begin_frame(int node, FrameKind kind, int dst, int mcs,
                                    std::uint32_t payload_bytes, double txpow_dbm,
                                    std::uint64_t ack_for) = 0;
  virtual double node_txpow(int node) const = 0;
  virtual double beacon_txpow(int node) const = 0;
};

/// Simplified DCF for one node: DIFS + slotted backoff with an OBSS/PD-aware
/// idle test, single MPDU per TXOP, immediate ACKs after SIFS, beacons queued
/// like data but sent unacknowledged at reference power.
///
/// Carrier sensing is evaluated at event boundaries (frame start/end and
/// threshold changes); with a zero-delay channel a transmission beginning in
/// the same microsecond as a competing one is always visible to the second
/// contender, which therefore defers.
class MacEntity {
 public:
  MacEntity(int node_id, int ap_id, DcfParams params, const McsTable* mcs,
            MacHost* host);

  /// Traffic arrival. Returns false when the queue is full and the payload
  /// was dropped.
  bool enqueue_data(std::uint32_t bytes);
  void enqueue_beacon();

  void on_medium_changed();
  void on_timer(MacTimer t);
  void on_own_frame_ended(const Frame& f);

  /// Outcome of the pending data attempt: a matched ACK decoded, or the
  /// timeout fired.
  void on_ack_verdict(bool success);

  /// Called on the receiver of a successful data frame: answer with an ACK
  /// after SIFS. The ACK is skipped if this node is mid-transmission then.
  void request_ack(std::uint64_t data_frame_id, int data_src);

  MacPhase phase() const { return phase_; }
  int cw() const { return cw_; }
  int retry_count() const { return retry_; }
  std::size_t queue_len() const { return queue_.size(); }
  std::uint64_t awaiting_frame() const { return phase_ == MacPhase::AwaitingAck ? attempt_frame_ : 0; }
  std::uint64_t queue_drops() const { return queue_drops_; }
  std::uint64_t retry_drops() const { return retry_drops_; }
  std::optional<std::int64_t> backoff_slots() const { return slots_; }

 private:
  struct PendingItem {
    bool beacon = false;
    std::uint32_t bytes = 0;
  };

  void kick();
  void cancel_access_timers();
  void pop_front_item();
  void start_transmission();

  int node_;
  int ap_;
  DcfParams p_;
  const McsTable* mcs_;
  MacHost* host_;

  MacPhase phase_ = MacPhase::Idle;
  std::deque<PendingItem> queue_;
  std::size_t data_queued_ = 0;
  int cw_;
  int retry_ = 0;
  std::optional<std::int64_t> slots_; // remaining backoff slots while counting down

  EventHandle difs_h_;
  EventHandle txstart_h_;
  EventHandle acktimeout_h_;
  EventHandle acktx_h_;

  int attempt_mcs_ = -1;
  std::uint64_t attempt_frame_ = 0;

  std::uint64_t ack_for_ = 0;
  int ack_dst_ = -1;
  bool in_ack_tx_ = false;

  std::uint64_t queue_drops_ = 0;
  std::uint64_t retry_drops_ = 0;
};

} // namespace srsim
