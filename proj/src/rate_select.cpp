#include "srsim/rate_select.hpp"

#include <algorithm>
#include <stdexcept>

namespace srsim {

MinstrelSelector::MinstrelSelector(const McsTable* table, MinstrelParams params)
    : table_(table), params_(params), stats_(table->size())
{
}

double MinstrelSelector::estimated_throughput(int mcs) const
{
  return stats_[static_cast<std::size_t>(mcs)].prob_ewma * table_->at(mcs).rate_mbps;
}

int MinstrelSelector::exploit_pick() const
{
  int best = 0;
  double best_tp = estimated_throughput(0);
  for (int m = 1; m < static_cast<int>(stats_.size()); ++m) {
    const double tp = estimated_throughput(m);
    if (tp > best_tp) { // strict: ties stay on the lower index
      best = m;
      best_tp = tp;
    }
  }
  return best;
}

int MinstrelSelector::pick(RngStream& rng)
{
  const bool lookaround = rng.uniform01() < params_.lookaround_prob;
  if (lookaround) {
    for (std::size_t m = 0; m < stats_.size(); ++m) {
      if (stats_[m].lifetime_attempts == 0) return static_cast<int>(m);
    }
    const int exploit = exploit_pick();
    // uniform over the other rates
    const auto r = rng.uniform_int(0, stats_.size() - 2);
    const int m = static_cast<int>(r);
    return m >= exploit ? m + 1 : m;
  }
  return exploit_pick();
}

void MinstrelSelector::update(int mcs, bool success)
{
  auto& s = stats_[static_cast<std::size_t>(mcs)];
  s.window_attempts += 1;
  s.lifetime_attempts += 1;
  if (success) s.window_successes += 1;
}

void MinstrelSelector::periodic_fold()
{
  for (auto& s : stats_) {
    if (s.window_attempts == 0) continue;
    const double p = static_cast<double>(s.window_successes) /
                     static_cast<double>(s.window_attempts);
    s.prob_ewma = s.folded_once
                      ? params_.ewma_weight * p + (1.0 - params_.ewma_weight) * s.prob_ewma
                      : p;
    s.folded_once = true;
    s.window_attempts = 0;
    s.window_successes = 0;
  }
}

void MinstrelSelector::set_prob_ewma(int mcs, double p)
{
  auto& s = stats_[static_cast<std::size_t>(mcs)];
  s.prob_ewma = p;
  s.folded_once = true;
  if (s.lifetime_attempts == 0) s.lifetime_attempts = 1;
}

ThompsonSelector::ThompsonSelector(const McsTable* table, ThompsonParams params)
    : table_(table), params_(params), arms_(table->size())
{
}

int ThompsonSelector::pick(RngStream& rng)
{
  int best = 0;
  double best_value = -1.0;
  for (int m = 0; m < static_cast<int>(arms_.size()); ++m) {
    const auto& a = arms_[static_cast<std::size_t>(m)];
    const double theta = rng.beta(a.alpha, a.beta);
    const double value = theta * table_->at(m).rate_mbps;
    if (value > best_value) {
      best = m;
      best_value = value;
    }
  }
  return best;
}

void ThompsonSelector::update(int mcs, bool success)
{
  const double keep = 1.0 - params_.decay;
  auto& a = arms_[static_cast<std::size_t>(mcs)];
  a.alpha = std::max(params_.count_floor, a.alpha * keep);
  a.beta = std::max(params_.count_floor, a.beta * keep);
  if (success) {
    a.alpha += 1.0;
  } else {
    a.beta += 1.0;
  }
}

std::unique_ptr<RateSelector> make_selector(RateKind kind, const McsTable* table,
                                            const MinstrelParams& mp,
                                            const ThompsonParams& tp)
{
  switch (kind) {
    case RateKind::Minstrel: return std::make_unique<MinstrelSelector>(table, mp);
    case RateKind::Thompson: return std::make_unique<ThompsonSelector>(table, tp);
  }
  throw std::logic_error("unknown rate selector kind");
}

} // namespace srsim
