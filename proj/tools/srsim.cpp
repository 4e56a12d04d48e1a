// srsim: batch front-end for the spatial-reuse WLAN simulator.
//
//   srsim scenario --kind box5 --seed 1 --out box5.json
//   srsim run --scenario box5.json --controller racebot --rate thompson --out out/
//   srsim sweep --scenario box5.json --seeds 1,2,3 --controllers racebot,dsc --out sweep/
//   srsim compare sweep/racebot_thompson_seed1 sweep/dsc_thompson_seed1
//
// Exit codes: 0 success, 1 configuration error, 2 run-time invariant violation.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srsim/errors.hpp"
#include "srsim/runio.hpp"
#include "srsim/scenario.hpp"
#include "srsim/simulation.hpp"

namespace {

using namespace srsim;

std::vector<std::string> split_list(const std::string& csv)
{
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ControllerKind parse_controller(const std::string& s)
{
  const auto k = controller_kind_from_string(s);
  if (!k) throw ConfigError("unknown controller: " + s);
  return *k;
}

RateKind parse_rate(const std::string& s)
{
  if (s == "minstrel") return RateKind::Minstrel;
  if (s == "thompson") return RateKind::Thompson;
  throw ConfigError("unknown rate selector: " + s);
}

ScenarioSpec load_scenario(const std::string& ref)
{
  if (ref == "box5") return build_box5(1);
  if (ref == "exposed-pair") return build_exposed_pair(-75.0);
  return ScenarioSpec::from_file(ref);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> controller;
  std::optional<std::string> rate;
  std::optional<double> horizon;
  std::optional<double> t_step;
  std::optional<std::string> mcs_table;
};

ScenarioSpec apply_overrides(ScenarioSpec spec, const Overrides& o)
{
  if (o.seed) spec.seed = *o.seed;
  if (o.controller) spec.controller = parse_controller(*o.controller);
  if (o.rate) spec.rate = parse_rate(*o.rate);
  if (o.horizon) spec.horizon_s = *o.horizon;
  if (o.t_step) spec.t_step_s = *o.t_step;
  if (o.mcs_table) spec.mcs_table = McsTable::from_file(*o.mcs_table);
  // A seed override regenerates generated topologies so positions track the
  // seed, not the file they were first written with.
  if (o.seed && spec.name == "box5") spec = [&] {
    ScenarioSpec fresh = build_box5(*o.seed);
    fresh.controller = spec.controller;
    fresh.rate = spec.rate;
    fresh.horizon_s = spec.horizon_s;
    fresh.t_step_s = spec.t_step_s;
    fresh.traffic = spec.traffic;
    fresh.mcs_table = spec.mcs_table;
    return fresh;
  }();
  spec.validate();
  return spec;
}

int do_run(const ScenarioSpec& spec, const std::string& out_dir, bool write_events)
{
  Simulation sim(spec);
  RunOptions opts;
  opts.record_frames = write_events;
  const RunResult result = sim.run(opts);
  write_run_dir(out_dir, spec, result, write_events);

  std::cout << out_dir << ": tm_tot=" << result.ledger.tm_tot_mbit() << " Mbit, "
            << result.stats.data_frames << " data frames ("
            << result.stats.data_success << " ok, " << result.stats.data_corrupted
            << " corrupted), " << result.stats.queue_drops << " queue drops\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"srsim: 802.11ax OBSS/PD spatial-reuse simulator"};
  app.require_subcommand(1);

  // --- scenario ---
  auto* sc_cmd = app.add_subcommand("scenario", "emit a scenario file");
  std::string sc_kind = "box5";
  std::uint64_t sc_seed = 1;
  double sc_jitter = 0.0;
  double sc_target_rssi = -75.0;
  std::string sc_out = "scenario.json";
  sc_cmd->add_option("--kind", sc_kind, "box5 | custom-box5 | exposed-pair");
  sc_cmd->add_option("--seed", sc_seed);
  sc_cmd->add_option("--jitter", sc_jitter, "custom-box5 perturbation radius, m");
  sc_cmd->add_option("--target-rssi", sc_target_rssi, "exposed-pair STA-STA level, dBm");
  sc_cmd->add_option("--out", sc_out);

  // --- run ---
  auto* run_cmd = app.add_subcommand("run", "run one simulation");
  std::string run_scenario;
  std::string run_out = "run-out";
  bool run_no_events = false;
  Overrides run_ov;
  std::string run_controller;
  std::string run_rate;
  std::uint64_t run_seed = 0;
  double run_horizon = 0.0;
  double run_t_step = 0.0;
  std::string run_mcs;
  run_cmd->add_option("--scenario", run_scenario, "scenario file, or box5 / exposed-pair")
      ->required();
  run_cmd->add_option("--out", run_out);
  run_cmd->add_option("--seed", run_seed);
  run_cmd->add_option("--controller", run_controller,
                      "racebot | dsc | rtot | no-obsspd | fixed");
  run_cmd->add_option("--rate", run_rate, "minstrel | thompson");
  run_cmd->add_option("--horizon", run_horizon, "seconds");
  run_cmd->add_option("--t-step", run_t_step, "seconds");
  run_cmd->add_option("--mcs-table", run_mcs, "mcs table file");
  run_cmd->add_flag("--no-events", run_no_events, "skip events.log");

  // --- sweep ---
  auto* sweep_cmd = app.add_subcommand("sweep", "run a seed x controller x rate grid");
  std::string sweep_scenario;
  std::string sweep_out = "sweep-out";
  std::string sweep_seeds = "1";
  std::string sweep_controllers = "racebot";
  std::string sweep_rates = "thompson";
  int sweep_jobs = 1;
  bool sweep_events = false;
  sweep_cmd->add_option("--scenario", sweep_scenario)->required();
  sweep_cmd->add_option("--out", sweep_out);
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated");
  sweep_cmd->add_option("--controllers", sweep_controllers, "comma-separated");
  sweep_cmd->add_option("--rates", sweep_rates, "comma-separated");
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel workers");
  sweep_cmd->add_flag("--events", sweep_events, "also write events.log per run");

  // --- compare ---
  auto* cmp_cmd = app.add_subcommand("compare", "summarize finished runs");
  std::vector<std::string> cmp_dirs;
  std::string cmp_out;
  cmp_cmd->add_option("dirs", cmp_dirs, "run directories")->expected(-1);
  cmp_cmd->add_option("--out", cmp_out, "write the aligned per-step series CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sc_cmd) {
      ScenarioSpec spec;
      if (sc_kind == "box5") {
        spec = build_box5(sc_seed);
      } else if (sc_kind == "custom-box5") {
        spec = build_custom_box5(sc_seed, sc_jitter);
      } else if (sc_kind == "exposed-pair") {
        spec = build_exposed_pair(sc_target_rssi);
      } else {
        throw ConfigError("unknown scenario kind: " + sc_kind);
      }
      spec.save(sc_out);
      std::cout << "wrote " << sc_out << '\n';
      return 0;
    }

    if (*run_cmd) {
      if (run_cmd->count("--seed")) run_ov.seed = run_seed;
      if (!run_controller.empty()) run_ov.controller = run_controller;
      if (!run_rate.empty()) run_ov.rate = run_rate;
      if (run_cmd->count("--horizon")) run_ov.horizon = run_horizon;
      if (run_cmd->count("--t-step")) run_ov.t_step = run_t_step;
      if (!run_mcs.empty()) run_ov.mcs_table = run_mcs;
      const ScenarioSpec spec = apply_overrides(load_scenario(run_scenario), run_ov);
      return do_run(spec, run_out, !run_no_events);
    }

    if (*sweep_cmd) {
      const ScenarioSpec base = load_scenario(sweep_scenario);
      std::vector<std::function<void()>> tasks;
      std::vector<std::string> dirs;
      for (const auto& ctrl : split_list(sweep_controllers)) {
        for (const auto& rate : split_list(sweep_rates)) {
          for (const auto& seed_str : split_list(sweep_seeds)) {
            Overrides ov;
            ov.seed = std::stoull(seed_str);
            ov.controller = ctrl;
            ov.rate = rate;
            const ScenarioSpec spec = apply_overrides(base, ov);
            const std::string dir = sweep_out + "/" + ctrl + "_" + rate + "_seed" +
                                    seed_str;
            dirs.push_back(dir);
            tasks.push_back([spec, dir, sweep_events] {
              Simulation sim(spec);
              RunOptions opts;
              opts.record_frames = sweep_events;
              const RunResult result = sim.run(opts);
              write_run_dir(dir, spec, result, sweep_events);
            });
          }
        }
      }
      // Independent runs; share nothing, so they can go wide.
      const int jobs = std::max(1, sweep_jobs);
      std::size_t next = 0;
      while (next < tasks.size()) {
        std::vector<std::future<void>> batch;
        for (int j = 0; j < jobs && next < tasks.size(); ++j, ++next) {
          batch.push_back(std::async(std::launch::async, tasks[next]));
        }
        for (auto& f : batch) f.get();
      }
      for (const auto& d : dirs) std::cout << d << '\n';
      return 0;
    }

    if (*cmp_cmd) {
      const Comparison cmp = compare_runs(cmp_dirs);
      std::cout << cmp.table;
      if (!cmp_out.empty()) {
        std::ofstream out(cmp_out);
        if (!out) throw ConfigError("cannot write " + cmp_out);
        out << cmp.series_csv;
        std::cout << "series: " << cmp_out << '\n';
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
