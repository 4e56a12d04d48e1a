#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "srsim/mcs.hpp"
#include "srsim/rng.hpp"
#include "srsim/units.hpp"

namespace srsim {

enum class RateKind { Minstrel, Thompson };

/// Pluggable MCS selection. `pick` is side-effect free apart from advancing
/// the stream; `update` is the only mutation path.
class RateSelector {
 public:
  virtual ~RateSelector() = default;
  virtual int pick(RngStream& rng) = 0;
  virtual void update(int mcs, bool success) = 0;
  virtual void periodic_fold() {}
  virtual RateKind kind() const = 0;
};

struct MinstrelParams {
  double lookaround_prob = 0.1;
  double ewma_weight = 0.25;          // weight of the newest window
  Micros fold_interval_us = 100'000;  // stats window length
};

/// Minstrel-style statistics table over the MCS ladder: track per-rate
/// success probability, exploit the best probability*rate product, spend a
/// small fraction of picks looking around. Untried rates are probed first so
/// every rate is sampled at least once.
class MinstrelSelector : public RateSelector {
 public:
  MinstrelSelector(const McsTable* table, MinstrelParams params);

  int pick(RngStream& rng) override;
  void update(int mcs, bool success) override;
  void periodic_fold() override;
  RateKind kind() const override { return RateKind::Minstrel; }

  /// argmax of estimated throughput, ties broken toward the lower index.
  int exploit_pick() const;
  double estimated_throughput(int mcs) const;
  double success_prob_ewma(int mcs) const { return stats_[static_cast<std::size_t>(mcs)].prob_ewma; }
  std::uint64_t lifetime_attempts(int mcs) const { return stats_[static_cast<std::size_t>(mcs)].lifetime_attempts; }

  /// Test hook: overwrite the probability estimate directly.
  void set_prob_ewma(int mcs, double p);

 private:
  struct Stat {
    std::uint64_t window_attempts = 0;
    std::uint64_t window_successes = 0;
    std::uint64_t lifetime_attempts = 0;
    double prob_ewma = 0.0;
    bool folded_once = false;
  };

  const McsTable* table_;
  MinstrelParams params_;
  std::vector<Stat> stats_;
};

struct ThompsonParams {
  double decay = 0.1;
  double count_floor = 0.01; // pseudo-counts never drop below this
};

/// Thompson sampling over Beta posteriors, one arm per MCS; the arm value is
/// the sampled success probability times the nominal rate.
class ThompsonSelector : public RateSelector {
 public:
  ThompsonSelector(const McsTable* table, ThompsonParams params);

  int pick(RngStream& rng) override;
  void update(int mcs, bool success) override;
  RateKind kind() const override { return RateKind::Thompson; }

  double alpha(int mcs) const { return arms_[static_cast<std::size_t>(mcs)].alpha; }
  double beta(int mcs) const { return arms_[static_cast<std::size_t>(mcs)].beta; }

 private:
  struct Arm {
    double alpha = 1.0;
    double beta = 1.0;
  };

  const McsTable* table_;
  ThompsonParams params_;
  std::vector<Arm> arms_;
};

std::unique_ptr<RateSelector> make_selector(RateKind kind, const McsTable* table,
                                            const MinstrelParams& mp,
                                            const ThompsonParams& tp);

/// EWMA over the successively chosen MCS indices; starts at 0 before any
/// attempt and shares its weight with the controller's count EWMA.
class McsEwma {
 public:
  explicit McsEwma(double alpha) : alpha_(alpha) {}

  void record(int mcs)
  {
    value_ = alpha_ * static_cast<double>(mcs) + (1.0 - alpha_) * value_;
  }
  double value() const { return value_; }

 private:
  double alpha_;
  double value_ = 0.0;
};

} // namespace srsim
