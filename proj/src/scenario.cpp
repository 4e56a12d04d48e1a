#include "srsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "srsim/errors.hpp"

namespace srsim {

using nlohmann::json;

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out)
{
  if (j.contains(key)) out = j.at(key).get<T>();
}

json position_to_json(const Position& p) { return json::array({p.x, p.y}); }

Position position_from_json(const json& j)
{
  if (!j.is_array() || j.size() != 2) throw ConfigError("position must be [x, y]");
  return Position{j[0].get<double>(), j[1].get<double>()};
}

json traffic_to_json(const TrafficSpec& t)
{
  return json{{"offered_rate_mbps", t.offered_rate_mbps},
              {"payload_bytes", t.payload_bytes}};
}

json phy_to_json(const PhyParams& p)
{
  return json{{"frequency_hz", p.frequency_hz},
              {"preamble_detection_dbm", p.preamble_detection_dbm},
              {"rx_sensitivity_dbm", p.rx_sensitivity_dbm},
              {"cca_ed_dbm", p.cca_ed_dbm},
              {"noise_floor_dbm", p.noise_floor_dbm}};
}

json mac_to_json(const DcfParams& m)
{
  return json{{"slot_us", m.slot_us},
              {"sifs_us", m.sifs_us},
              {"difs_us", m.difs_us},
              {"cw_min", m.cw_min},
              {"cw_max", m.cw_max},
              {"retry_limit", m.retry_limit},
              {"mac_header_bytes", m.mac_header_bytes},
              {"ack_bytes", m.ack_bytes},
              {"beacon_bytes", m.beacon_bytes},
              {"preamble_us", m.preamble_us},
              {"beacon_interval_us", m.beacon_interval_us},
              {"queue_cap", m.queue_cap}};
}

json racebot_to_json(const RacebotParams& r)
{
  return json{{"margin_db", r.margin_db},   {"gamma", r.gamma},
              {"alpha", r.alpha},           {"t_update_s", r.t_update_s},
              {"ofc_thr", r.ofc_thr},       {"bin_width_db", r.bin_width_db}};
}

json mcs_to_json(const McsTable& t)
{
  json rows = json::array();
  for (const auto& e : t.entries()) {
    rows.push_back(json::array({e.index, e.rate_mbps, e.min_rssi_dbm, e.min_sinr_db}));
  }
  return rows;
}

McsTable mcs_from_json(const json& rows)
{
  std::string text;
  for (const auto& r : rows) {
    if (!r.is_array() || r.size() != 4) throw ConfigError("mcs_table rows must have 4 fields");
    std::ostringstream line;
    line << r[0].get<int>() << ' ' << r[1].get<double>() << ' ' << r[2].get<double>()
         << ' ' << r[3].get<double>() << '\n';
    text += line.str();
  }
  std::istringstream in(text);
  return McsTable::from_stream(in);
}

const char* rate_kind_name(RateKind k)
{
  return k == RateKind::Minstrel ? "minstrel" : "thompson";
}

RateKind rate_kind_from(const std::string& s)
{
  if (s == "minstrel") return RateKind::Minstrel;
  if (s == "thompson") return RateKind::Thompson;
  throw ConfigError("unknown rate selector: " + s);
}

ControllerKind controller_kind_from(const std::string& s)
{
  const auto k = controller_kind_from_string(s);
  if (!k) throw ConfigError("unknown controller: " + s);
  return *k;
}

} // namespace

std::string ScenarioSpec::to_json() const
{
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["bandwidth_mhz"] = bandwidth_mhz;
  j["horizon_s"] = horizon_s;
  j["t_step_s"] = t_step_s;
  j["controller"] = to_string(controller);
  j["rate"] = rate_kind_name(rate);
  j["fixed_obss_pd_dbm"] = fixed_obss_pd_dbm;
  j["traffic"] = traffic_to_json(traffic);
  j["phy"] = phy_to_json(phy);
  j["mac"] = mac_to_json(mac);
  j["racebot"] = racebot_to_json(racebot);
  j["dsc"] = json{{"margin_db", dsc.margin_db}};
  j["rtot"] = json{{"offset_db", rtot.offset_db}};
  j["minstrel"] = json{{"lookaround_prob", minstrel.lookaround_prob},
                       {"ewma_weight", minstrel.ewma_weight},
                       {"fold_interval_us", minstrel.fold_interval_us}};
  j["thompson"] = json{{"decay", thompson.decay}, {"count_floor", thompson.count_floor}};
  j["mcs_table"] = mcs_to_json(mcs_table);

  json bss_rows = json::array();
  for (const auto& b : bss) {
    json row;
    row["color"] = b.color;
    row["ap"] = position_to_json(b.ap);
    json stas = json::array();
    for (const auto& s : b.stas) stas.push_back(position_to_json(s));
    row["stas"] = stas;
    if (b.offered_rate_mbps) row["offered_rate_mbps"] = *b.offered_rate_mbps;
    if (b.controller) row["controller"] = to_string(*b.controller);
    if (b.fixed_obss_pd_dbm) row["fixed_obss_pd_dbm"] = *b.fixed_obss_pd_dbm;
    bss_rows.push_back(row);
  }
  j["bss"] = bss_rows;
  return j.dump(2);
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: bad json: ") + e.what());
  }

  ScenarioSpec s;
  try {
    get_if(j, "name", s.name);
    get_if(j, "seed", s.seed);
    get_if(j, "bandwidth_mhz", s.bandwidth_mhz);
    get_if(j, "horizon_s", s.horizon_s);
    get_if(j, "t_step_s", s.t_step_s);
    if (j.contains("controller"))
      s.controller = controller_kind_from(j.at("controller").get<std::string>());
    if (j.contains("rate")) s.rate = rate_kind_from(j.at("rate").get<std::string>());
    get_if(j, "fixed_obss_pd_dbm", s.fixed_obss_pd_dbm);

    if (j.contains("traffic")) {
      const auto& t = j.at("traffic");
      get_if(t, "offered_rate_mbps", s.traffic.offered_rate_mbps);
      get_if(t, "payload_bytes", s.traffic.payload_bytes);
    }
    if (j.contains("phy")) {
      const auto& p = j.at("phy");
      get_if(p, "frequency_hz", s.phy.frequency_hz);
      get_if(p, "preamble_detection_dbm", s.phy.preamble_detection_dbm);
      get_if(p, "rx_sensitivity_dbm", s.phy.rx_sensitivity_dbm);
      get_if(p, "cca_ed_dbm", s.phy.cca_ed_dbm);
      get_if(p, "noise_floor_dbm", s.phy.noise_floor_dbm);
    }
    if (j.contains("mac")) {
      const auto& m = j.at("mac");
      get_if(m, "slot_us", s.mac.slot_us);
      get_if(m, "sifs_us", s.mac.sifs_us);
      get_if(m, "difs_us", s.mac.difs_us);
      get_if(m, "cw_min", s.mac.cw_min);
      get_if(m, "cw_max", s.mac.cw_max);
      get_if(m, "retry_limit", s.mac.retry_limit);
      get_if(m, "mac_header_bytes", s.mac.mac_header_bytes);
      get_if(m, "ack_bytes", s.mac.ack_bytes);
      get_if(m, "beacon_bytes", s.mac.beacon_bytes);
      get_if(m, "preamble_us", s.mac.preamble_us);
      get_if(m, "beacon_interval_us", s.mac.beacon_interval_us);
      get_if(m, "queue_cap", s.mac.queue_cap);
    }
    if (j.contains("racebot")) {
      const auto& r = j.at("racebot");
      get_if(r, "margin_db", s.racebot.margin_db);
      get_if(r, "gamma", s.racebot.gamma);
      get_if(r, "alpha", s.racebot.alpha);
      get_if(r, "t_update_s", s.racebot.t_update_s);
      get_if(r, "ofc_thr", s.racebot.ofc_thr);
      get_if(r, "bin_width_db", s.racebot.bin_width_db);
    }
    if (j.contains("dsc")) get_if(j.at("dsc"), "margin_db", s.dsc.margin_db);
    if (j.contains("rtot")) get_if(j.at("rtot"), "offset_db", s.rtot.offset_db);
    if (j.contains("minstrel")) {
      const auto& m = j.at("minstrel");
      get_if(m, "lookaround_prob", s.minstrel.lookaround_prob);
      get_if(m, "ewma_weight", s.minstrel.ewma_weight);
      get_if(m, "fold_interval_us", s.minstrel.fold_interval_us);
    }
    if (j.contains("thompson")) {
      const auto& t = j.at("thompson");
      get_if(t, "decay", s.thompson.decay);
      get_if(t, "count_floor", s.thompson.count_floor);
    }
    if (j.contains("mcs_table")) s.mcs_table = mcs_from_json(j.at("mcs_table"));

    if (!j.contains("bss")) throw ConfigError("scenario: missing bss list");
    for (const auto& row : j.at("bss")) {
      BssSpec b;
      b.color = row.at("color").get<int>();
      b.ap = position_from_json(row.at("ap"));
      for (const auto& sta : row.at("stas")) b.stas.push_back(position_from_json(sta));
      if (row.contains("offered_rate_mbps"))
        b.offered_rate_mbps = row.at("offered_rate_mbps").get<double>();
      if (row.contains("controller"))
        b.controller = controller_kind_from(row.at("controller").get<std::string>());
      if (row.contains("fixed_obss_pd_dbm"))
        b.fixed_obss_pd_dbm = row.at("fixed_obss_pd_dbm").get<double>();
      s.bss.push_back(std::move(b));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: bad field: ") + e.what());
  }
  return s;
}

ScenarioSpec ScenarioSpec::from_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ScenarioSpec s = from_json(buf.str());
  s.validate();
  return s;
}

void ScenarioSpec::save(const std::string& path) const
{
  std::ofstream out(path);
  if (!out) throw ConfigError("scenario: cannot write " + path);
  out << to_json() << '\n';
}

void ScenarioSpec::validate() const
{
  const ObssPdBounds bounds = ObssPdBounds::for_bandwidth_mhz(bandwidth_mhz);

  if (horizon_s <= 0.0) throw ConfigError("horizon_s must be positive");
  if (t_step_s <= 0.0) throw ConfigError("t_step_s must be positive");
  const Micros horizon_us = seconds_to_micros(horizon_s);
  const Micros step_us = seconds_to_micros(t_step_s);
  if (step_us <= 0 || horizon_us % step_us != 0)
    throw ConfigError("horizon_s must be a whole number of t_step_s windows");

  if (bss.empty()) throw ConfigError("scenario needs at least one bss");
  std::vector<int> colors;
  for (const auto& b : bss) {
    if (b.color < 1 || b.color > 63) throw ConfigError("bss color must be in 1..63");
    for (int c : colors) {
      if (c == b.color) throw ConfigError("bss colors must be distinct");
    }
    colors.push_back(b.color);
    if (b.offered_rate_mbps && *b.offered_rate_mbps < 0.0)
      throw ConfigError("offered_rate_mbps must be nonnegative");
    if (b.fixed_obss_pd_dbm &&
        (*b.fixed_obss_pd_dbm < bounds.min_dbm || *b.fixed_obss_pd_dbm > bounds.max_dbm))
      throw ConfigError("fixed_obss_pd_dbm outside the bandwidth bounds");
  }
  if (traffic.offered_rate_mbps < 0.0)
    throw ConfigError("offered_rate_mbps must be nonnegative");
  if (traffic.payload_bytes == 0) throw ConfigError("payload_bytes must be positive");
  if (mac.queue_cap < 1) throw ConfigError("queue_cap must be at least 1");
  if (fixed_obss_pd_dbm < bounds.min_dbm || fixed_obss_pd_dbm > bounds.max_dbm)
    throw ConfigError("fixed_obss_pd_dbm outside the bandwidth bounds");

  if (racebot.gamma <= 0.0 || racebot.gamma >= 1.0)
    throw ConfigError("racebot gamma must be in (0, 1)");
  if (racebot.alpha < 0.0 || racebot.alpha > 1.0)
    throw ConfigError("racebot alpha must be in [0, 1]");
  if (racebot.margin_db <= 0.0) throw ConfigError("racebot margin_db must be positive");
  if (racebot.t_update_s <= 0.0) throw ConfigError("racebot t_update_s must be positive");
  if (racebot.bin_width_db <= 0.0) throw ConfigError("racebot bin_width_db must be positive");

  mcs_table.validate(phy.rx_sensitivity_dbm);

  const auto nodes = scenario_nodes(*this);
  for (const auto& n : nodes) {
    if (!std::isfinite(n.pos.x) || !std::isfinite(n.pos.y))
      throw ConfigError("node positions must be finite");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t k = i + 1; k < nodes.size(); ++k) {
      if (distance_m(nodes[i].pos, nodes[k].pos) < kFarFieldMinMeters)
        throw ConfigError("node pair closer than the far-field minimum");
    }
  }
  // Association by strongest beacon must match the configured membership:
  // with equal reference power that means strictly nearest AP.
  for (const auto& n : nodes) {
    if (n.kind != NodeKind::Sta) continue;
    const double own = distance_m(n.pos, nodes[static_cast<std::size_t>(n.ap)].pos);
    for (const auto& other : nodes) {
      if (other.kind != NodeKind::Ap || other.id == n.ap) continue;
      if (distance_m(n.pos, other.pos) <= own)
        throw ConfigError("sta would associate with a foreign ap");
    }
  }
}

std::vector<NodeInit> scenario_nodes(const ScenarioSpec& spec)
{
  std::vector<NodeInit> nodes;
  int id = 0;
  for (std::size_t b = 0; b < spec.bss.size(); ++b) {
    const BssSpec& bs = spec.bss[b];
    ControllerConfig cc;
    cc.kind = bs.controller.value_or(spec.controller);
    cc.racebot = spec.racebot;
    cc.dsc = spec.dsc;
    cc.rtot = spec.rtot;
    cc.fixed_obss_pd_dbm = bs.fixed_obss_pd_dbm.value_or(spec.fixed_obss_pd_dbm);

    NodeInit ap;
    ap.id = id;
    ap.kind = NodeKind::Ap;
    ap.bss = static_cast<int>(b);
    ap.ap = id;
    ap.color = bs.color;
    ap.pos = bs.ap;
    ap.offered_rate_mbps = 0.0;
    ap.controller = cc;
    nodes.push_back(ap);
    const int ap_id = id;
    ++id;

    for (const auto& sp : bs.stas) {
      NodeInit sta;
      sta.id = id;
      sta.kind = NodeKind::Sta;
      sta.bss = static_cast<int>(b);
      sta.ap = ap_id;
      sta.color = bs.color;
      sta.pos = sp;
      sta.offered_rate_mbps = bs.offered_rate_mbps.value_or(spec.traffic.offered_rate_mbps);
      sta.controller = cc;
      nodes.push_back(sta);
      ++id;
    }
  }
  return nodes;
}

namespace {

Position disc_point(const Position& center, double radius, RngStream& rng)
{
  const double r = radius * std::sqrt(rng.uniform01());
  const double theta = 2.0 * M_PI * rng.uniform01();
  return Position{center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

bool placement_ok(const Position& candidate, const std::vector<Position>& aps,
                  std::size_t own_ap, const std::vector<Position>& placed)
{
  for (const auto& p : placed) {
    if (distance_m(candidate, p) < kFarFieldMinMeters) return false;
  }
  const double own = distance_m(candidate, aps[own_ap]);
  if (own < kFarFieldMinMeters) return false;
  for (std::size_t a = 0; a < aps.size(); ++a) {
    if (a == own_ap) continue;
    if (distance_m(candidate, aps[a]) <= own) return false;
  }
  return true;
}

} // namespace

ScenarioSpec build_box5(std::uint64_t seed, int bss_a_stas, int bss_bc_stas)
{
  // Cell spacing keeps every cross-BSS level inside the (-82, -62) window at
  // reference power: audible, so the default thresholds serialize the three
  // cells, yet below the energy-detect level, so raised thresholds can
  // actually ignore it. Station discs keep uplinks at the top rate at full
  // power and still viable after the coupled power reduction.
  constexpr double kSide = 120.0;
  constexpr double kRadiusA = 12.0;
  constexpr double kRadiusBC = 6.0;

  ScenarioSpec s;
  s.name = "box5";
  s.seed = seed;

  const std::vector<Position> aps = {
      {0.0, 0.0}, {kSide, 0.0}, {kSide / 2.0, kSide * std::sqrt(3.0) / 2.0}};
  const std::vector<int> counts = {bss_a_stas, bss_bc_stas, bss_bc_stas};
  const std::vector<double> radii = {kRadiusA, kRadiusBC, kRadiusBC};

  RngRoot root(seed);
  RngStream topo = root.stream("topology");

  std::vector<Position> placed(aps.begin(), aps.end());
  for (std::size_t b = 0; b < aps.size(); ++b) {
    BssSpec bs;
    bs.color = static_cast<int>(b) + 1;
    bs.ap = aps[b];
    for (int k = 0; k < counts[b]; ++k) {
      Position pos;
      bool ok = false;
      for (int tries = 0; tries < 1000; ++tries) {
        pos = disc_point(aps[b], radii[b], topo);
        if (placement_ok(pos, aps, b, placed)) {
          ok = true;
          break;
        }
      }
      if (!ok) throw ConfigError("box5: could not place a station");
      placed.push_back(pos);
      bs.stas.push_back(pos);
    }
    s.bss.push_back(std::move(bs));
  }
  s.validate();
  return s;
}

ScenarioSpec build_custom_box5(std::uint64_t seed, double jitter_m, int bss_a_stas,
                               int bss_bc_stas)
{
  if (jitter_m < 0.0) throw ConfigError("jitter must be nonnegative");
  ScenarioSpec s = build_box5(seed, bss_a_stas, bss_bc_stas);
  s.name = "custom-box5";

  std::vector<Position> aps;
  for (const auto& b : s.bss) aps.push_back(b.ap);

  RngRoot root(seed);
  RngStream jitter = root.stream("topology-jitter");

  std::vector<Position> placed(aps.begin(), aps.end());
  for (std::size_t b = 0; b < s.bss.size(); ++b) {
    for (auto& sta : s.bss[b].stas) {
      Position pos;
      bool ok = false;
      for (int tries = 0; tries < 1000; ++tries) {
        pos = disc_point(sta, jitter_m, jitter);
        if (placement_ok(pos, aps, b, placed)) {
          ok = true;
          break;
        }
      }
      if (!ok) throw ConfigError("custom-box5: jitter produced no valid placement");
      placed.push_back(pos);
      sta = pos;
    }
  }
  s.validate();
  return s;
}

ScenarioSpec build_exposed_pair(double inter_bss_rssi_dbm, double sta_ap_m)
{
  ScenarioSpec s;
  s.name = "exposed-pair";
  s.seed = 1;
  s.controller = ControllerKind::NoObssPd;

  const ObssPdBounds bounds = ObssPdBounds::for_bandwidth_mhz(s.bandwidth_mhz);
  const double loss_needed = bounds.txpow_ref_dbm - inter_bss_rssi_dbm;
  const double separation = friis_distance_for_loss(loss_needed, s.phy.frequency_hz);
  if (!std::isfinite(separation) || separation < kFarFieldMinMeters)
    throw ConfigError("exposed-pair: target rssi not achievable in the far field");

  const double top_rssi =
      bounds.txpow_ref_dbm - friis_path_loss_db(sta_ap_m, s.phy.frequency_hz);
  if (top_rssi < s.mcs_table.entries().back().min_rssi_dbm)
    throw ConfigError("exposed-pair: uplink would not support the top mcs");

  BssSpec b1;
  b1.color = 1;
  b1.ap = Position{-sta_ap_m, 0.0};
  b1.stas = {Position{0.0, 0.0}};
  BssSpec b2;
  b2.color = 2;
  b2.ap = Position{separation + sta_ap_m, 0.0};
  b2.stas = {Position{separation, 0.0}};
  s.bss = {b1, b2};
  s.validate();
  return s;
}

double poisson_mean_interarrival_us(double rate_mbps, std::uint32_t payload_bytes)
{
  return static_cast<double>(payload_bytes) * 8.0 / rate_mbps; // Mbps == bits/us
}

Micros next_arrival_delta_us(double rate_mbps, std::uint32_t payload_bytes,
                             RngStream& rng)
{
  const double mean = poisson_mean_interarrival_us(rate_mbps, payload_bytes);
  const double gap = rng.exponential(mean);
  return std::max<Micros>(0, static_cast<Micros>(std::llround(gap)));
}

std::uint64_t scenario_fingerprint(const ScenarioSpec& spec)
{
  json j = json::parse(spec.to_json());
  j.erase("name");
  j.erase("controller");
  j.erase("rate");
  j.erase("fixed_obss_pd_dbm");
  j.erase("racebot");
  j.erase("dsc");
  j.erase("rtot");
  j.erase("minstrel");
  j.erase("thompson");
  for (auto& b : j.at("bss")) {
    b.erase("controller");
    b.erase("fixed_obss_pd_dbm");
  }
  const std::string canon = j.dump();

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace srsim
