#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srsim {

/// One HE rate: nominal data rate plus the minimum receive level and SINR
/// it needs to decode.
struct McsEntry {
  int index = 0;
  double rate_mbps = 0.0;
  double min_rssi_dbm = 0.0;
  double min_sinr_db = 0.0;

  bool operator==(const McsEntry&) const = default;
};

/// Ordered MCS ladder. The built-in table is the 20 MHz / 1 spatial stream /
/// 0.8 us GI rate set; deployments with corrected sensitivity numbers can
/// load their own from a text file (one "index rate min_rssi min_sinr" line
/// per entry, '#' comments).
class McsTable {
 public:
  static McsTable he20_default();
  static McsTable from_stream(std::istream& in);
  static McsTable from_file(const std::string& path);

  std::size_t size() const { return entries_.size(); }
  const McsEntry& at(int index) const;
  const std::vector<McsEntry>& entries() const { return entries_; }
  int top_index() const { return static_cast<int>(entries_.size()) - 1; }

  /// Throws ConfigError unless rates and minimum RSSI strictly increase with
  /// the index and entry 0 sits exactly at the receiver sensitivity.
  void validate(double rx_sensitivity_dbm) const;

  std::string to_text() const;
  bool operator==(const McsTable&) const = default;

 private:
  std::vector<McsEntry> entries_;
};

} // namespace srsim
