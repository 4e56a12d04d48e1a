#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srsim/controllers.hpp"
#include "srsim/mac.hpp"
#include "srsim/mcs.hpp"
#include "srsim/medium.hpp"
#include "srsim/propagation.hpp"
#include "srsim/rate_select.hpp"
#include "srsim/rng.hpp"

namespace srsim {

struct TrafficSpec {
  double offered_rate_mbps = 300.0; // per STA; saturates the MAC by design
  std::uint32_t payload_bytes = 1024;
};

/// One BSS: the AP, its stations, and optional per-BSS overrides.
struct BssSpec {
  int color = 1;
  Position ap;
  std::vector<Position> stas;
  std::optional<double> offered_rate_mbps;      // overrides TrafficSpec
  std::optional<ControllerKind> controller;     // overrides the global kind
  std::optional<double> fixed_obss_pd_dbm;      // for Fixed controllers
};

/// A complete, self-contained run description. Builders materialize every
/// node position so a spec serializes losslessly and a loaded file replays
/// bit-identically.
struct ScenarioSpec {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  int bandwidth_mhz = 20;
  double horizon_s = 50.0;
  double t_step_s = 1.0;

  ControllerKind controller = ControllerKind::Racebot;
  RateKind rate = RateKind::Thompson;
  double fixed_obss_pd_dbm = -82.0;

  TrafficSpec traffic;
  PhyParams phy;
  DcfParams mac;
  RacebotParams racebot;
  DscParams dsc;
  RtotParams rtot;
  MinstrelParams minstrel;
  ThompsonParams thompson;
  McsTable mcs_table = McsTable::he20_default();

  std::vector<BssSpec> bss;

  int queue_cap() const { return mac.queue_cap; }

  std::string to_json() const;
  static ScenarioSpec from_json(const std::string& text);
  static ScenarioSpec from_file(const std::string& path);
  void save(const std::string& path) const;

  /// Throws ConfigError on colors out of range or repeated, nodes inside the
  /// far-field minimum, ambiguous association, or bad parameters.
  void validate() const;
};

enum class NodeKind { Ap, Sta };

struct NodeInit {
  int id = 0;
  NodeKind kind = NodeKind::Sta;
  int bss = 0;
  int ap = 0; // own id for APs
  int color = 1;
  Position pos;
  double offered_rate_mbps = 0.0;
  ControllerConfig controller;
};

/// Flattens a scenario into the node table (APs first within each BSS).
std::vector<NodeInit> scenario_nodes(const ScenarioSpec& spec);

/// Three-BSS outdoor layout: APs on an equilateral triangle (60 m sides),
/// BSS-A stations uniform in a 30 m disc, BSS-B/C stations uniform in 15 m
/// discs. Counts default to 15/5/5.
ScenarioSpec build_box5(std::uint64_t seed, int bss_a_stas = 15, int bss_bc_stas = 5);

/// Same layout with every station position perturbed uniformly inside a
/// disc of radius `jitter_m`, re-validated and resampled on conflicts.
ScenarioSpec build_custom_box5(std::uint64_t seed, double jitter_m,
                               int bss_a_stas = 15, int bss_bc_stas = 5);

/// Two single-station BSSs arranged on a line so the STA-to-STA level at
/// reference power equals `inter_bss_rssi_dbm` while both uplinks support
/// the top MCS.
ScenarioSpec build_exposed_pair(double inter_bss_rssi_dbm, double sta_ap_m = 4.0);

/// Mean inter-arrival time implied by an offered rate and payload size.
double poisson_mean_interarrival_us(double rate_mbps, std::uint32_t payload_bytes);

/// Draws the next packet inter-arrival gap in whole microseconds.
Micros next_arrival_delta_us(double rate_mbps, std::uint32_t payload_bytes,
                             RngStream& rng);

/// Canonical fingerprint of everything that must match for two runs to be
/// comparable: topology, traffic, PHY/MAC parameters, seed and horizon.
/// Controller and rate-selector choices are excluded on purpose.
std::uint64_t scenario_fingerprint(const ScenarioSpec& spec);

} // namespace srsim
