#include <doctest.h>

#include <vector>

#include "srsim/mac.hpp"

using namespace srsim;

namespace {

// Scripted environment: the test controls the clock, the channel verdict and
// timer dispatch, and records emitted frames.
struct FakeHost : MacHost {
  Micros t = 0;
  bool idle = true;
  std::uint64_t next_draw = 0;
  std::uint64_t frame_seq = 0;
  McsTable table = McsTable::he20_default();

  struct Timer {
    std::uint64_t seq;
    int node;
    MacTimer kind;
    Micros at;
    bool cancelled = false;
  };
  std::vector<Timer> timers;
  std::uint64_t timer_seq = 0;

  struct Emitted {
    FrameKind kind;
    int dst;
    int mcs;
    std::uint32_t bytes;
    double txpow;
    std::uint64_t ack_for;
    Micros at;
  };
  std::vector<Emitted> frames;
  std::vector<std::pair<int, bool>> feedback;

  Micros now() const override { return t; }
  EventHandle schedule_timer(int node, MacTimer kind, Micros at) override
  {
    timers.push_back(Timer{++timer_seq, node, kind, at});
    return EventHandle{timer_seq};
  }
  void cancel_timer(EventHandle& h) override
  {
    for (auto& tm : timers) {
      if (tm.seq == h.seq) tm.cancelled = true;
    }
    h.clear();
  }
  bool channel_idle(int) const override { return idle; }
  std::uint64_t backoff_draw(int, std::uint64_t) override { return next_draw; }
  int choose_mcs(int) override { return 7; }
  void rate_feedback(int, int mcs, bool success) override
  {
    feedback.emplace_back(mcs, success);
  }
  std::uint64_t begin_frame(int, FrameKind kind, int dst, int mcs,
                            std::uint32_t bytes, double txpow,
                            std::uint64_t ack_for) override
  {
    frames.push_back(Emitted{kind, dst, mcs, bytes, txpow, ack_for, t});
    return ++frame_seq;
  }
  double node_txpow(int) const override { return 17.0; }
  double beacon_txpow(int) const override { return 21.0; }

  // Fires the single pending timer of `kind`; returns its time.
  Micros fire(MacEntity& mac, MacTimer kind)
  {
    for (auto& tm : timers) {
      if (!tm.cancelled && tm.kind == kind) {
        tm.cancelled = true;
        t = tm.at;
        mac.on_timer(kind);
        return tm.at;
      }
    }
    FAIL("no pending timer of that kind");
    return 0;
  }

  bool has_pending(MacTimer kind) const
  {
    for (const auto& tm : timers) {
      if (!tm.cancelled && tm.kind == kind) return true;
    }
    return false;
  }
};

Frame own_data_frame(std::uint64_t id)
{
  Frame f;
  f.id = id;
  f.kind = FrameKind::Data;
  f.src = 0;
  f.dst = 1;
  return f;
}

} // namespace

TEST_CASE("binary exponential backoff and its clamp")
{
  DcfParams p;
  CHECK(next_cw_after_failure(15, p) == 31);
  CHECK(next_cw_after_failure(31, p) == 63);
  CHECK(next_cw_after_failure(1023, p) == 1023);
}

TEST_CASE("airtime: preamble plus bits over rate, rounded up")
{
  // 1024 B payload + 34 B header at the MCS7 rate
  CHECK(frame_airtime_us(1058, 86.0, 40) == 139); // ceil(8464/86) = 99, +40
  // ACK at the base rate
  CHECK(frame_airtime_us(14, 8.6, 40) == 54); // ceil(112/8.6) = 14, +40
  CHECK(frame_airtime_us(80, 8.6, 40) == 115); // beacon, ceil(640/8.6) = 75
}

TEST_CASE("idle channel: enqueue leads to DIFS, backoff, transmission")
{
  FakeHost host;
  DcfParams p;
  MacEntity mac(0, 1, p, &host.table, &host);

  host.next_draw = 3;
  CHECK(mac.enqueue_data(1024));
  CHECK(mac.phase() == MacPhase::WaitingDifs);

  const Micros difs_at = host.fire(mac, MacTimer::DifsDone);
  CHECK(difs_at == 34);
  CHECK(mac.phase() == MacPhase::Backoff);
  CHECK(mac.backoff_slots() == 3);

  const Micros tx_at = host.fire(mac, MacTimer::TxStart);
  CHECK(tx_at == 34 + 3 * 9);
  CHECK(mac.phase() == MacPhase::Transmitting);
  REQUIRE(host.frames.size() == 1);
  CHECK(host.frames[0].kind == FrameKind::Data);
  CHECK(host.frames[0].dst == 1);
  CHECK(host.frames[0].mcs == 7);
  CHECK(host.frames[0].bytes == 1024);
  CHECK(host.frames[0].txpow == 17.0);
}

TEST_CASE("empty queue never transmits")
{
  FakeHost host;
  MacEntity mac(0, 1, DcfParams{}, &host.table, &host);
  mac.on_medium_changed();
  CHECK(mac.phase() == MacPhase::Idle);
  CHECK(host.frames.empty());
}

TEST_CASE("busy channel suspends the countdown; contention restarts on idle")
{
  FakeHost host;
  DcfParams p;
  MacEntity mac(0, 1, p, &host.table, &host);

  host.next_draw = 5;
  mac.enqueue_data(1024);
  host.fire(mac, MacTimer::DifsDone); // backoff starts at t=34, 5 slots
  // two whole slots pass, then the channel goes busy mid-slot
  host.t = 34 + 2 * 9 + 4;
  host.idle = false;
  mac.on_medium_changed();
  CHECK(mac.phase() == MacPhase::Deferring);
  CHECK_FALSE(mac.backoff_slots().has_value()); // countdown discarded
  CHECK_FALSE(host.has_pending(MacTimer::TxStart));

  host.t = 200;
  host.idle = true;
  host.next_draw = 3;
  mac.on_medium_changed();
  CHECK(mac.phase() == MacPhase::WaitingDifs);
  host.fire(mac, MacTimer::DifsDone);
  CHECK(mac.backoff_slots() == 3); // fresh draw from the unchanged window
  host.fire(mac, MacTimer::TxStart);
  CHECK(host.frames.size() == 1);
  CHECK(host.frames[0].at == 234 + 27);
}

TEST_CASE("ack outcomes drive CW, retries and the queue")
{
  FakeHost host;
  DcfParams p;
  MacEntity mac(0, 1, p, &host.table, &host);
  host.next_draw = 0;

  mac.enqueue_data(1024);
  host.fire(mac, MacTimer::DifsDone);
  host.fire(mac, MacTimer::TxStart);
  host.t += 139;
  mac.on_own_frame_ended(own_data_frame(1));
  CHECK(mac.phase() == MacPhase::AwaitingAck);
  CHECK(host.has_pending(MacTimer::AckTimeout));

  SUBCASE("failure doubles the window and keeps the payload")
  {
    host.fire(mac, MacTimer::AckTimeout);
    CHECK(mac.cw() == 31);
    CHECK(mac.retry_count() == 1);
    CHECK(mac.queue_len() == 1);
    REQUIRE(host.feedback.size() == 1);
    CHECK(host.feedback[0] == std::pair<int, bool>{7, false});

    // second failure: 31 -> 63
    host.fire(mac, MacTimer::DifsDone);
    host.fire(mac, MacTimer::TxStart);
    host.t += 139;
    mac.on_own_frame_ended(own_data_frame(2));
    host.fire(mac, MacTimer::AckTimeout);
    CHECK(mac.cw() == 63);
    CHECK(mac.retry_count() == 2);
  }

  SUBCASE("success resets the window and pops the payload")
  {
    mac.on_ack_verdict(true);
    CHECK(mac.cw() == 15);
    CHECK(mac.retry_count() == 0);
    CHECK(mac.queue_len() == 0);
    CHECK(mac.phase() == MacPhase::Idle);
    REQUIRE(host.feedback.size() == 1);
    CHECK(host.feedback[0] == std::pair<int, bool>{7, true});
  }
}

TEST_CASE("success after retries still resets")
{
  FakeHost host;
  DcfParams p;
  MacEntity mac(0, 1, p, &host.table, &host);
  host.next_draw = 0;
  mac.enqueue_data(1024);
  std::uint64_t id = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    host.fire(mac, MacTimer::DifsDone);
    host.fire(mac, MacTimer::TxStart);
    host.t += 139;
    mac.on_own_frame_ended(own_data_frame(++id));
    if (attempt < 3) host.fire(mac, MacTimer::AckTimeout);
  }
  CHECK(mac.retry_count() == 3);
  mac.on_ack_verdict(true);
  CHECK(mac.retry_count() == 0);
  CHECK(mac.cw() == 15);
}

TEST_CASE("the payload is dropped after the retry limit")
{
  FakeHost host;
  DcfParams p;
  p.retry_limit = 2;
  MacEntity mac(0, 1, p, &host.table, &host);
  host.next_draw = 0;
  mac.enqueue_data(1024);
  std::uint64_t id = 0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    host.fire(mac, MacTimer::DifsDone);
    host.fire(mac, MacTimer::TxStart);
    host.t += 139;
    mac.on_own_frame_ended(own_data_frame(++id));
    host.fire(mac, MacTimer::AckTimeout);
  }
  CHECK(mac.queue_len() == 0); // dropped after retries 1, 2, then limit
  CHECK(mac.retry_drops() == 1);
  CHECK(mac.cw() == 15);
}

TEST_CASE("queue cap drops excess arrivals")
{
  FakeHost host;
  DcfParams p;
  p.queue_cap = 2;
  host.idle = false; // nothing drains
  MacEntity mac(0, 1, p, &host.table, &host);
  CHECK(mac.enqueue_data(1024));
  CHECK(mac.enqueue_data(1024));
  CHECK_FALSE(mac.enqueue_data(1024));
  CHECK(mac.queue_len() == 2);
  CHECK(mac.queue_drops() == 1);
}

TEST_CASE("a losing same-instant race defers and contends again")
{
  FakeHost host;
  DcfParams p;
  MacEntity mac(0, 1, p, &host.table, &host);
  host.next_draw = 2;
  mac.enqueue_data(1024);
  host.fire(mac, MacTimer::DifsDone);
  host.idle = false; // a competing frame started in the same microsecond
  host.fire(mac, MacTimer::TxStart);
  CHECK(mac.phase() == MacPhase::Deferring);
  CHECK(host.frames.empty());

  host.idle = true;
  host.t += 500;
  host.next_draw = 0;
  mac.on_medium_changed();
  host.fire(mac, MacTimer::DifsDone);
  host.fire(mac, MacTimer::TxStart); // zero slots: fires immediately
  CHECK(host.frames.size() == 1);
}

TEST_CASE("ack transmission suspends access and resumes after")
{
  FakeHost host;
  DcfParams p;
  MacEntity mac(0, 1, p, &host.table, &host);
  host.next_draw = 7;
  mac.enqueue_data(1024);
  host.fire(mac, MacTimer::DifsDone);
  CHECK(mac.phase() == MacPhase::Backoff);

  // a successful reception asks for an ACK mid-backoff
  mac.request_ack(55, 3);
  host.fire(mac, MacTimer::AckTx);
  CHECK(mac.phase() == MacPhase::Transmitting);
  REQUIRE(host.frames.size() == 1);
  CHECK(host.frames[0].kind == FrameKind::Ack);
  CHECK(host.frames[0].dst == 3);
  CHECK(host.frames[0].ack_for == 55);
  CHECK(host.frames[0].txpow == 17.0); // acks use the coupled node power

  Frame ack;
  ack.id = 1;
  ack.kind = FrameKind::Ack;
  ack.src = 0;
  host.t += 54;
  mac.on_own_frame_ended(ack);
  CHECK(mac.phase() == MacPhase::WaitingDifs); // access resumes
}

TEST_CASE("beacons transmit unacknowledged at reference power")
{
  FakeHost host;
  DcfParams p;
  MacEntity mac(0, 0, p, &host.table, &host); // an AP: own id as peer
  host.next_draw = 0;
  mac.enqueue_beacon();
  host.fire(mac, MacTimer::DifsDone);
  host.fire(mac, MacTimer::TxStart);
  REQUIRE(host.frames.size() == 1);
  CHECK(host.frames[0].kind == FrameKind::Beacon);
  CHECK(host.frames[0].dst == -1);
  CHECK(host.frames[0].mcs == 0);
  CHECK(host.frames[0].txpow == 21.0);
  CHECK(host.frames[0].bytes == p.beacon_bytes);

  Frame b;
  b.id = 1;
  b.kind = FrameKind::Beacon;
  b.src = 0;
  host.t += 115;
  mac.on_own_frame_ended(b);
  CHECK(mac.phase() == MacPhase::Idle);
  CHECK(mac.queue_len() == 0);
  CHECK_FALSE(host.has_pending(MacTimer::AckTimeout));
}
