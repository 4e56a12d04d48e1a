#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace srsim {

/// Throughput of one node over one step: bytes*8 / (1e6 * step), in decimal
/// megabits per second.
double node_throughput_mbps(std::uint64_t rbytes, double t_step_s);

double aggregated_throughput_mbps(std::span<const double> per_node_mbps);

/// Per-node, per-step received-byte counters. Bytes are credited at the
/// receiver, on successful data reception only.
class MetricsLedger {
 public:
  MetricsLedger() = default;
  MetricsLedger(int n_nodes, double t_step_s);

  void count_rx(int node, std::uint32_t bytes);
  void flush_step(); // closes the current window

  int n_nodes() const { return n_nodes_; }
  double t_step_s() const { return t_step_s_; }
  std::size_t n_steps() const { return steps_.size(); }
  std::uint64_t rbytes(std::size_t step, int node) const;
  double node_mbps(std::size_t step, int node) const;
  double agg_mbps(std::size_t step) const;
  std::uint64_t total_bytes() const;

  /// Step-sum total transfer in megabits: t_step * sum of per-step
  /// aggregated throughputs.
  double tm_tot_mbit() const;

  void write_csv(std::ostream& out) const;

  bool operator==(const MetricsLedger&) const = default;

 private:
  int n_nodes_ = 0;
  double t_step_s_ = 1.0;
  std::vector<std::uint64_t> window_;
  std::vector<std::vector<std::uint64_t>> steps_;
};

double total_transfer_mbit(const MetricsLedger& ledger);

} // namespace srsim
