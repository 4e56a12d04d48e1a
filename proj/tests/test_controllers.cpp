#include <doctest.h>

#include <cmath>
#include <vector>

#include "srsim/controllers.hpp"
#include "srsim/errors.hpp"
#include "srsim/rng.hpp"

using namespace srsim;

namespace {

const ObssPdBounds k20 = ObssPdBounds::for_bandwidth_mhz(20);

} // namespace

TEST_CASE("bandwidth bounds")
{
  CHECK(k20.min_dbm == -82.0);
  CHECK(k20.max_dbm == -62.0);
  CHECK(k20.txpow_ref_dbm == 21.0);
  const auto b40 = ObssPdBounds::for_bandwidth_mhz(40);
  CHECK(b40.min_dbm == -79.0);
  CHECK(b40.max_dbm == -59.0);
  CHECK(b40.txpow_ref_dbm == 18.0);
  const auto b80 = ObssPdBounds::for_bandwidth_mhz(80);
  CHECK(b80.min_dbm == -76.0);
  CHECK(b80.txpow_ref_dbm == 15.0);
  CHECK_THROWS_AS(ObssPdBounds::for_bandwidth_mhz(30), ConfigError);
}

TEST_CASE("threshold to txpower mapping")
{
  CHECK(txpow_from_threshold(-82.0, k20) == 21.0);
  CHECK(txpow_from_threshold(-62.0, k20) == 1.0);
  CHECK(txpow_from_threshold(-73.0, ObssPdBounds::for_bandwidth_mhz(160)) == 12.0);
  CHECK_THROWS_AS(txpow_from_threshold(-85.0, k20), std::logic_error);
  CHECK_THROWS_AS(txpow_from_threshold(-61.0, k20), std::logic_error);
}

TEST_CASE("coupling sum is bit-exact across the whole range")
{
  RngStream rng(5);
  for (int mhz : {20, 40, 80, 160}) {
    const auto b = ObssPdBounds::for_bandwidth_mhz(mhz);
    for (int i = 0; i < 2000; ++i) {
      const double pd = b.min_dbm + (b.max_dbm - b.min_dbm) * rng.uniform01();
      const double tx = txpow_from_threshold(pd, b);
      CHECK(tx + pd == b.txpow_ref_dbm + b.min_dbm);
    }
  }
}

TEST_CASE("count ewma arithmetic")
{
  CHECK(ofc_ewma_update(0.0, 10.0, 0.5) == 5.0);
  CHECK(ofc_ewma_update(3.0, 10.0, 1.0) == 10.0);
  CHECK(ofc_ewma_update(3.0, 10.0, 0.0) == 3.0);
}

TEST_CASE("count ewma recurrence matches the direct geometric sum")
{
  RngStream rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = 0.1 + 0.8 * rng.uniform01();
    std::vector<double> xs;
    double rec = 0.0;
    for (int i = 0; i < 1000; ++i) {
      xs.push_back(100.0 * rng.uniform01());
      rec = ofc_ewma_update(rec, xs.back(), alpha);
    }
    long double direct = 0.0L;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      direct += static_cast<long double>(alpha) *
                std::pow(static_cast<long double>(1.0 - alpha), static_cast<int>(k)) *
                static_cast<long double>(xs[xs.size() - 1 - k]);
    }
    const double rel = std::abs(rec - static_cast<double>(direct)) /
                       std::max(1e-300, std::abs(static_cast<double>(direct)));
    CHECK(rel < 1e-12);
  }
}

TEST_CASE("periodic goal: busy bin wins, sparse bin pruned")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-40.0);
  for (int i = 0; i < 30; ++i) c.observe_obss(-80.0); // ewma 15 after one fold
  for (int i = 0; i < 4; ++i) c.observe_obss(-60.0);  // ewma 2, under the threshold
  auto s1 = c.step(0.0, 1.0); // timer 1, no periodic yet
  CHECK_FALSE(s1.periodic_fired);
  auto s2 = c.step(0.0, 1.0); // timer 2 > 1: periodic block runs
  CHECK(s2.periodic_fired);
  CHECK(c.goal() == -75.0); // min(-80+5, -40-5)
  // counts reset afterwards, ewmas persist
  for (const auto& [bin, n] : c.period_counts()) CHECK(n == 0);
  CHECK(c.count_ewmas().at(-80) == 15.0);
}

TEST_CASE("periodic goal: beacon margin dominates")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-68.0);
  for (int i = 0; i < 40; ++i) c.observe_obss(-70.0); // ewma 20
  c.step(0.0, 1.0);
  c.step(0.0, 1.0);
  CHECK(c.goal() == -73.0); // min(-65, -73)
}

TEST_CASE("periodic goal: nothing above the count threshold leaves the floor")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-40.0);
  for (int i = 0; i < 10; ++i) c.observe_obss(-70.0); // ewma 5 <= 10
  c.step(0.0, 1.0);
  c.step(0.0, 1.0);
  CHECK(c.goal() == RacebotController::kGoalFloorDbm);
}

TEST_CASE("adjust, no-drop branch: halve toward the goal")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-40.0);
  c.restore(-82.0, -72.0);
  const auto s = c.step(0.0, 0.25); // timer below the period: adjust only
  CHECK(s.branch == RacebotBranch::NoDrop);
  CHECK(s.obss_pd_dbm == -77.0);
  CHECK(s.txpow_dbm == txpow_from_threshold(-77.0, k20));
}

TEST_CASE("adjust, no-drop branch: the goal floor cannot drag below the bounds")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-40.0);
  // goal at the reset floor: the plain average would be -91.5
  const auto s = c.step(0.0, 0.25);
  CHECK(s.branch == RacebotBranch::NoDrop);
  CHECK(s.obss_pd_dbm == -82.0);
  CHECK(s.txpow_dbm == 21.0);
}

TEST_CASE("adjust, drop branch: back off toward the beacon")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-60.0);
  c.step(8.0, 0.25);                  // prev := 8
  c.restore(-70.0, -64.0);            // pin the state the drop step sees
  const auto s = c.step(5.0, 0.25);   // 8 * 0.7 > 5: drop branch
  // max((-70 + -60 - 5)/2, -82) = -67.5: the formula raised the threshold
  CHECK(s.branch == RacebotBranch::DropRaised);
  CHECK(s.obss_pd_dbm == -67.5);
  CHECK(c.goal() == doctest::Approx((-67.5 + -64.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("adjust, drop branch: clamps to the upper bound on a strong beacon")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-30.0);
  c.restore(-62.0, -62.0);
  c.step(8.0, 0.25);
  const auto s = c.step(2.0, 0.25); // drop
  // max((-62 + -35)/2, -82) = -48.5, clamped to the -62 ceiling
  CHECK(s.obss_pd_dbm == -62.0);
  CHECK(s.txpow_dbm == 1.0);
}

TEST_CASE("no drop before the gamma fraction is crossed")
{
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-50.0);
  c.step(8.0, 0.25);
  const auto s = c.step(5.7, 0.25); // 8*0.7 = 5.6 <= 5.7
  CHECK(s.branch == RacebotBranch::NoDrop);
}

TEST_CASE("goal convergence: the no-drop step halves the gap every time")
{
  RacebotParams p;
  p.t_update_s = 1e9; // keep the periodic block out of the way
  RacebotController c(k20, p);
  c.observe_beacon(-40.0);
  c.restore(-82.0, -70.0);
  double gap = std::abs(-82.0 - -70.0);
  for (int i = 0; i < 20; ++i) {
    const auto s = c.step(0.0, 1.0);
    const double new_gap = std::abs(s.obss_pd_dbm - -70.0);
    CHECK(new_gap == doctest::Approx(gap / 2.0).epsilon(1e-9));
    gap = new_gap;
  }
  CHECK(gap < 0.5 * std::pow(2.0, -10));
}

TEST_CASE("racebot stays in bounds with exact coupling under random inputs")
{
  RngStream rng(11);
  RacebotController c(k20, RacebotParams{});
  c.observe_beacon(-90.0 + 60.0 * rng.uniform01());
  for (int i = 0; i < 3000; ++i) {
    if (rng.uniform01() < 0.7) c.observe_obss(-95.0 + 40.0 * rng.uniform01());
    if (rng.uniform01() < 0.1) c.observe_beacon(-90.0 + 60.0 * rng.uniform01());
    if (rng.uniform01() < 0.3) {
      const auto s = c.step(12.0 * rng.uniform01(), 1.0);
      CHECK(s.obss_pd_dbm >= k20.min_dbm);
      CHECK(s.obss_pd_dbm <= k20.max_dbm);
      CHECK(s.txpow_dbm + s.obss_pd_dbm == k20.txpow_ref_dbm + k20.min_dbm);
    }
  }
}

TEST_CASE("dsc pins the threshold at beacon minus margin")
{
  DscController c(k20, DscParams{20.0});
  SUBCASE("in range")
  {
    c.observe_beacon(-50.0);
    const auto s = c.step(0.0, 1.0);
    CHECK(s.obss_pd_dbm == -70.0);
    CHECK(s.txpow_dbm == txpow_from_threshold(-70.0, k20));
  }
  SUBCASE("lower clamp")
  {
    c.observe_beacon(-75.0);
    CHECK(c.step(0.0, 1.0).obss_pd_dbm == -82.0);
  }
  SUBCASE("upper clamp")
  {
    c.observe_beacon(-30.0);
    CHECK(c.step(0.0, 1.0).obss_pd_dbm == -62.0);
  }
  SUBCASE("holds before any beacon")
  {
    const auto s = c.step(0.0, 1.0);
    CHECK(s.obss_pd_dbm == -82.0);
    CHECK(s.txpow_dbm == 21.0);
  }
}

TEST_CASE("rtot keeps the configured headroom below the beacon")
{
  RtotController c(k20, RtotParams{10.0});
  SUBCASE("upper clamp")
  {
    c.observe_beacon(-50.0);
    CHECK(c.step(0.0, 1.0).obss_pd_dbm == -62.0);
  }
  SUBCASE("in range")
  {
    c.observe_beacon(-70.0);
    CHECK(c.step(0.0, 1.0).obss_pd_dbm == -80.0);
  }
  SUBCASE("lower clamp")
  {
    c.observe_beacon(-78.0);
    CHECK(c.step(0.0, 1.0).obss_pd_dbm == -82.0);
  }
}

TEST_CASE("no-obsspd never moves")
{
  NoObssPdController c(k20);
  c.observe_beacon(-45.0);
  for (int i = 0; i < 5; ++i) {
    const auto s = c.step(11.0, 1.0);
    CHECK(s.obss_pd_dbm == -82.0);
    CHECK(s.txpow_dbm == 21.0);
  }
}

TEST_CASE("fixed holds its value with coupled power")
{
  FixedController c(k20, -72.0);
  CHECK(c.obss_pd() == -72.0);
  CHECK(c.txpow() == 11.0);
  const auto s = c.step(0.0, 1.0);
  CHECK(s.obss_pd_dbm == -72.0);
  CHECK(s.txpow_dbm == 11.0);
}

TEST_CASE("beacon ewma: first sample seeds, then the recurrence applies")
{
  DscController c(k20, DscParams{});
  c.observe_beacon(-50.0);
  CHECK(c.beacon_ewma() == -50.0);
  c.observe_beacon(-60.0);
  CHECK(c.beacon_ewma() == -55.0); // alpha 0.5
}
