#include "srsim/metrics.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace srsim {

double node_throughput_mbps(std::uint64_t rbytes, double t_step_s)
{
  if (t_step_s <= 0.0) throw std::logic_error("node_throughput: t_step must be positive");
  return static_cast<double>(rbytes) * 8.0 / (1000.0 * 1000.0 * t_step_s);
}

double aggregated_throughput_mbps(std::span<const double> per_node_mbps)
{
  double sum = 0.0;
  for (double v : per_node_mbps) sum += v;
  return sum;
}

MetricsLedger::MetricsLedger(int n_nodes, double t_step_s)
    : n_nodes_(n_nodes), t_step_s_(t_step_s),
      window_(static_cast<std::size_t>(n_nodes), 0)
{
}

void MetricsLedger::count_rx(int node, std::uint32_t bytes)
{
  window_[static_cast<std::size_t>(node)] += bytes;
}

void MetricsLedger::flush_step()
{
  steps_.push_back(window_);
  window_.assign(window_.size(), 0);
}

std::uint64_t MetricsLedger::rbytes(std::size_t step, int node) const
{
  return steps_[step][static_cast<std::size_t>(node)];
}

double MetricsLedger::node_mbps(std::size_t step, int node) const
{
  return node_throughput_mbps(rbytes(step, node), t_step_s_);
}

double MetricsLedger::agg_mbps(std::size_t step) const
{
  double sum = 0.0;
  for (int n = 0; n < n_nodes_; ++n) sum += node_mbps(step, n);
  return sum;
}

std::uint64_t MetricsLedger::total_bytes() const
{
  std::uint64_t total = 0;
  for (const auto& step : steps_) {
    for (std::uint64_t b : step) total += b;
  }
  return total;
}

double MetricsLedger::tm_tot_mbit() const
{
  double sum = 0.0;
  for (std::size_t s = 0; s < steps_.size(); ++s) sum += agg_mbps(s);
  return t_step_s_ * sum;
}

double total_transfer_mbit(const MetricsLedger& ledger) { return ledger.tm_tot_mbit(); }

void MetricsLedger::write_csv(std::ostream& out) const
{
  char buf[64];
  out << "step,node,rbytes,throughput_mbps\n";
  for (std::size_t s = 0; s < steps_.size(); ++s) {
    for (int n = 0; n < n_nodes_; ++n) {
      std::snprintf(buf, sizeof buf, "%.10g", node_mbps(s, n));
      out << s << ',' << n << ',' << rbytes(s, n) << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.10g", agg_mbps(s));
    out << s << ",agg,," << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.10g", tm_tot_mbit());
  out << "tm_tot,,," << buf << '\n';
}

} // namespace srsim
