#include "srsim/mcs.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "srsim/errors.hpp"

namespace srsim {

McsTable McsTable::he20_default()
{
  McsTable t;
  t.entries_ = {
      {0, 8.6, -82.0, 3.0},    {1, 17.2, -80.0, 6.0},  {2, 25.8, -78.0, 9.0},
      {3, 34.4, -76.0, 12.0},  {4, 51.6, -74.0, 15.0}, {5, 68.8, -72.0, 18.0},
      {6, 77.4, -70.0, 20.0},  {7, 86.0, -68.0, 22.0}, {8, 103.2, -66.0, 25.0},
      {9, 114.7, -64.0, 27.0}, {10, 129.0, -61.0, 30.0}, {11, 143.4, -59.0, 32.0},
  };
  return t;
}

McsTable McsTable::from_stream(std::istream& in)
{
  McsTable t;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    McsEntry e;
    if (fields >> e.index >> e.rate_mbps >> e.min_rssi_dbm >> e.min_sinr_db) {
      t.entries_.push_back(e);
    } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ConfigError("mcs table: unparseable line: " + line);
    }
  }
  if (t.entries_.empty()) throw ConfigError("mcs table: no entries");
  return t;
}

McsTable McsTable::from_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("mcs table: cannot open " + path);
  return from_stream(in);
}

const McsEntry& McsTable::at(int index) const
{
  if (index < 0 || index >= static_cast<int>(entries_.size()))
    throw std::out_of_range("mcs index");
  return entries_[static_cast<std::size_t>(index)];
}

void McsTable::validate(double rx_sensitivity_dbm) const
{
  if (entries_.empty()) throw ConfigError("mcs table: empty");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.index != static_cast<int>(i))
      throw ConfigError("mcs table: indices must be contiguous from 0");
    if (i > 0) {
      if (e.rate_mbps <= entries_[i - 1].rate_mbps)
        throw ConfigError("mcs table: rate must strictly increase with index");
      if (e.min_rssi_dbm <= entries_[i - 1].min_rssi_dbm)
        throw ConfigError("mcs table: min rssi must strictly increase with index");
    }
  }
  if (entries_[0].min_rssi_dbm != rx_sensitivity_dbm)
    throw ConfigError("mcs table: entry 0 min rssi must equal rx sensitivity");
}

std::string McsTable::to_text() const
{
  std::string out = "# index rate_mbps min_rssi_dbm min_sinr_db\n";
  char buf[96];
  for (const auto& e : entries_) {
    std::snprintf(buf, sizeof buf, "%d %.10g %.10g %.10g\n", e.index, e.rate_mbps,
                  e.min_rssi_dbm, e.min_sinr_db);
    out += buf;
  }
  return out;
}

} // namespace srsim
