#include <doctest.h>

#include <string>
#include <vector>

#include "srsim/event_queue.hpp"

using namespace srsim;

namespace {

std::vector<std::string> drain(EventQueue<std::string>& q, Micros horizon)
{
  std::vector<std::string> out;
  while (auto e = q.pop(horizon)) out.push_back(e->payload);
  return out;
}

} // namespace

TEST_CASE("events dequeue in timestamp order")
{
  EventQueue<std::string> q;
  q.schedule(300, "c");
  q.schedule(100, "a");
  q.schedule(200, "b");
  CHECK(drain(q, 1000) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("equal timestamps dequeue in insertion order")
{
  EventQueue<std::string> q;
  q.schedule(0, "beacon");
  q.schedule(0, "traffic");
  q.schedule(0, "third");
  CHECK(drain(q, 1) == std::vector<std::string>{"beacon", "traffic", "third"});
}

TEST_CASE("pop advances the clock to the dispatched event")
{
  EventQueue<int> q;
  q.schedule(100, 1);
  CHECK(q.now() == 0);
  auto e = q.pop(1000);
  REQUIRE(e.has_value());
  CHECK(q.now() == 100);
}

TEST_CASE("scheduling in the past is a logic error")
{
  EventQueue<int> q;
  q.schedule(50, 1);
  (void)q.pop(1000); // now == 50
  CHECK_THROWS_AS(q.schedule(40, 2), std::logic_error);
  CHECK_NOTHROW(q.schedule(50, 3)); // same instant is allowed
}

TEST_CASE("horizon stops dispatch at or after it")
{
  EventQueue<int> q;
  q.schedule(10, 1);
  q.schedule(20, 2);
  q.schedule(30, 3);
  int count = 0;
  while (q.pop(20)) ++count;
  CHECK(count == 1); // only the event at 10; 20 is at the horizon
}

TEST_CASE("cancelled events never dispatch")
{
  EventQueue<int> q;
  q.schedule(10, 1);
  auto h = q.schedule(20, 2);
  q.schedule(30, 3);
  q.cancel(h);
  std::vector<int> seen;
  while (auto e = q.pop(1000)) seen.push_back(e->payload);
  CHECK(seen == std::vector<int>{1, 3});
  CHECK_FALSE(h.valid()); // cancel consumes the handle
}

TEST_CASE("cancel is idempotent and safe on cleared handles")
{
  EventQueue<int> q;
  auto h = q.schedule(10, 1);
  q.cancel(h);
  q.cancel(h);
  CHECK_FALSE(q.pop(1000).has_value());
}

TEST_CASE("identical schedules replay identically")
{
  auto fill = [](EventQueue<int>& q) {
    q.schedule(5, 10);
    q.schedule(5, 11);
    q.schedule(1, 12);
    q.schedule(9, 13);
  };
  EventQueue<int> a;
  EventQueue<int> b;
  fill(a);
  fill(b);
  while (true) {
    auto ea = a.pop(100);
    auto eb = b.pop(100);
    CHECK(ea.has_value() == eb.has_value());
    if (!ea) break;
    CHECK(ea->payload == eb->payload);
    CHECK(a.now() == b.now());
  }
}
