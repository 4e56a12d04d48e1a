#include "srsim/runio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "srsim/errors.hpp"

namespace srsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string rate_name(RateKind k) { return k == RateKind::Minstrel ? "minstrel" : "thompson"; }

} // namespace

void write_run_dir(const std::string& dir, const ScenarioSpec& spec,
                   const RunResult& result, bool write_events)
{
  fs::create_directories(dir);
  const fs::path base(dir);

  write_file(base / "scenario.json", spec.to_json() + "\n");

  json manifest;
  manifest["format_version"] = 1;
  manifest["seed"] = spec.seed;
  manifest["controller"] = to_string(spec.controller);
  manifest["rate"] = rate_name(spec.rate);
  manifest["horizon_s"] = spec.horizon_s;
  manifest["t_step_s"] = spec.t_step_s;
  manifest["scenario_fingerprint"] = scenario_fingerprint(spec);
  manifest["n_nodes"] = result.ledger.n_nodes();
  manifest["n_steps"] = result.ledger.n_steps();
  write_file(base / "manifest.json", manifest.dump(2) + "\n");

  {
    std::ostringstream out;
    result.ledger.write_csv(out);
    write_file(base / "metrics.csv", out.str());
  }
  {
    std::ostringstream out;
    write_controller_trace(out, result.trace);
    write_file(base / "controller_trace.csv", out.str());
  }
  if (write_events) {
    std::ostringstream out;
    write_event_log(out, result.frames);
    write_file(base / "events.log", out.str());
  }
}

RunSummary read_run_dir(const std::string& dir)
{
  const fs::path base(dir);
  RunSummary s;
  s.dir = dir;

  json manifest;
  try {
    manifest = json::parse(read_file(base / "manifest.json"));
    s.controller = manifest.at("controller").get<std::string>();
    s.rate = manifest.at("rate").get<std::string>();
    s.seed = manifest.at("seed").get<std::uint64_t>();
    s.scenario_fingerprint = manifest.at("scenario_fingerprint").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(dir + ": bad manifest: " + e.what());
  }

  // metrics.csv: per-node rows, one "agg" row per step, tm_tot footer.
  std::istringstream in(read_file(base / "metrics.csv"));
  std::string line;
  std::getline(in, line); // header
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string step;
    std::string node;
    std::string rbytes;
    std::string mbps;
    std::getline(row, step, ',');
    std::getline(row, node, ',');
    std::getline(row, rbytes, ',');
    std::getline(row, mbps, ',');
    if (step == "tm_tot") {
      s.tm_tot_mbit = std::stod(mbps);
    } else if (node == "agg") {
      s.per_step_agg_mbps.push_back(std::stod(mbps));
    }
  }
  if (!s.per_step_agg_mbps.empty()) s.final_step_agg_mbps = s.per_step_agg_mbps.back();
  return s;
}

Comparison compare_runs(const std::vector<std::string>& dirs)
{
  if (dirs.size() < 2) throw ConfigError("compare needs at least two run directories");

  std::vector<RunSummary> runs;
  for (const auto& d : dirs) runs.push_back(read_run_dir(d));
  for (const auto& r : runs) {
    if (r.scenario_fingerprint != runs.front().scenario_fingerprint)
      throw ConfigError("compare: scenario fingerprints differ (" + r.dir + " vs " +
                        runs.front().dir + ")");
  }

  std::ostringstream table;
  char buf[64];
  table << "dir,controller,rate,seed,tm_tot_mbit,final_step_agg_mbps\n";
  for (const auto& r : runs) {
    std::snprintf(buf, sizeof buf, "%.10g", r.tm_tot_mbit);
    table << r.dir << ',' << r.controller << ',' << r.rate << ',' << r.seed << ','
          << buf;
    std::snprintf(buf, sizeof buf, "%.10g", r.final_step_agg_mbps);
    table << ',' << buf << '\n';
  }

  std::size_t max_steps = 0;
  for (const auto& r : runs) max_steps = std::max(max_steps, r.per_step_agg_mbps.size());

  std::ostringstream series;
  series << "step";
  for (const auto& r : runs) series << ',' << r.dir;
  series << '\n';
  for (std::size_t step = 0; step < max_steps; ++step) {
    series << step;
    for (const auto& r : runs) {
      series << ',';
      if (step < r.per_step_agg_mbps.size()) {
        std::snprintf(buf, sizeof buf, "%.10g", r.per_step_agg_mbps[step]);
        series << buf;
      }
    }
    series << '\n';
  }

  return Comparison{table.str(), series.str()};
}

} // namespace srsim
