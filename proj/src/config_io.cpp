#include "rnm/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

namespace rnm {

namespace {

const std::set<std::string>& scenario_keys() {
  static const std::set<std::string> keys{
      "scenario.lanes", "scenario.nodes_per_lane", "scenario.tx_range_m", "scenario.protocol",
      "scenario.lane_width_m", "scenario.highway_length_m", "scenario.risk_zone", "scenario.target_zone",
      "scenario.seed", "scenario.n_seeds",
      "radio.bandwidth_bps", "radio.payload_bytes", "radio.queue_capacity", "radio.collisions",
      "radio.charge_collided_rx",
      "mac.slot_us", "mac.ifs_us", "mac.contention_window",
      "protocol.max_wait_s", "protocol.max_hops", "protocol.directions",
      "traffic.messages_total", "traffic.message_interval_s", "traffic.quiescence_s",
      "mobility.speed_min_mph", "mobility.speed_max_mph", "mobility.min_gap_m", "mobility.tick_s",
      "mobility.accel_mps2", "mobility.decel_mps2", "mobility.frozen"};
  return keys;
}

const std::set<std::string>& sweep_keys() {
  static const std::set<std::string> keys{"sweep.lanes", "sweep.nodes_per_lane", "sweep.tx_ranges",
                                          "sweep.protocols", "sweep.n_seeds"};
  return keys;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> tokens(const std::string& text) {
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream is(normalized);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": cannot parse '" + text + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(key + ": must be finite");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

class Reader {
 public:
  explicit Reader(const ConfigEntries& entries) : entries_(entries) {}

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) > 0; }
  [[nodiscard]] const std::string& text(const std::string& key) const { return entries_.at(key); }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(key + ": required field is missing");
  }

  template <typename T>
  void get(const std::string& key, T& out) const {
    if (!has(key)) return;
    if constexpr (std::is_same_v<T, bool>) {
      out = parse_bool(key, text(key));
    } else {
      out = parse_value<T>(key, text(key));
    }
  }

  void check_known(const std::set<std::string>& a, const std::set<std::string>* b = nullptr) const {
    for (const auto& [key, value] : entries_) {
      if (a.count(key) || (b && b->count(key))) continue;
      throw ConfigError(key + ": unknown field");
    }
  }

 private:
  const ConfigEntries& entries_;
};

void read_scenario(const Reader& r, ScenarioConfig& c, std::uint32_t& n_seeds) {
  r.get("scenario.lanes", c.lanes);
  r.get("scenario.nodes_per_lane", c.nodes_per_lane);
  r.get("scenario.tx_range_m", c.tx_range_m);
  if (r.has("scenario.protocol")) c.protocol = parse_protocol(trim(r.text("scenario.protocol")));
  r.get("scenario.lane_width_m", c.lane_width_m);
  r.get("scenario.highway_length_m", c.highway_length_m);
  if (r.has("scenario.risk_zone")) {
    const auto t = tokens(r.text("scenario.risk_zone"));
    if (t.size() == 2) {
      c.risk_zone = RiskZoneBounds::point({parse_value<double>("scenario.risk_zone", t[0]),
                                           parse_value<double>("scenario.risk_zone", t[1])});
    } else if (t.size() == 4) {
      c.risk_zone = {parse_value<double>("scenario.risk_zone", t[0]), parse_value<double>("scenario.risk_zone", t[1]),
                     parse_value<double>("scenario.risk_zone", t[2]), parse_value<double>("scenario.risk_zone", t[3])};
    } else {
      throw ConfigError("scenario.risk_zone: expected 'x y' or 'x_min y_min x_max y_max'");
    }
  }
  if (r.has("scenario.target_zone")) {
    const auto t = tokens(r.text("scenario.target_zone"));
    if (t.size() != 2) throw ConfigError("scenario.target_zone: expected 'x y'");
    c.target_zone_point = {parse_value<double>("scenario.target_zone", t[0]),
                           parse_value<double>("scenario.target_zone", t[1])};
  }
  r.get("scenario.seed", c.rng_seed);
  r.get("scenario.n_seeds", n_seeds);

  r.get("radio.bandwidth_bps", c.bandwidth_bps);
  r.get("radio.payload_bytes", c.payload_bytes);
  r.get("radio.queue_capacity", c.queue_capacity);
  r.get("radio.collisions", c.collisions);
  r.get("radio.charge_collided_rx", c.charge_collided_rx);

  double us = 0.0;
  if (r.has("mac.slot_us")) {
    r.get("mac.slot_us", us);
    c.mac.slot_s = us / 1e6;
  }
  if (r.has("mac.ifs_us")) {
    r.get("mac.ifs_us", us);
    c.mac.ifs_s = us / 1e6;
  }
  r.get("mac.contention_window", c.mac.contention_window);

  r.get("protocol.max_wait_s", c.max_wait_s);
  r.get("protocol.max_hops", c.max_hops);
  unsigned directions = c.directions;
  r.get("protocol.directions", directions);
  if (directions > 15) throw ConfigError("protocol.directions: must fit in 4 bits");
  c.directions = static_cast<std::uint8_t>(directions);

  r.get("traffic.messages_total", c.messages_total);
  r.get("traffic.message_interval_s", c.message_interval_s);
  r.get("traffic.quiescence_s", c.quiescence_s);

  r.get("mobility.speed_min_mph", c.mobility.speed_min_mph);
  r.get("mobility.speed_max_mph", c.mobility.speed_max_mph);
  r.get("mobility.min_gap_m", c.mobility.min_gap_m);
  r.get("mobility.tick_s", c.mobility.tick_s);
  r.get("mobility.accel_mps2", c.mobility.accel_mps2);
  r.get("mobility.decel_mps2", c.mobility.decel_mps2);
  r.get("mobility.frozen", c.mobility.frozen);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& t : tokens(text)) out.push_back(parse_value<T>(key, t));
  if (out.empty()) throw ConfigError(key + ": list is empty");
  return out;
}

std::vector<double> parse_ranges(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') == std::string::npos) return parse_list<double>("sweep.tx_ranges", t);
  std::vector<std::string> parts;
  std::stringstream ss(t);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("sweep.tx_ranges: expected 'start:stop:step'");
  const double start = parse_value<double>("sweep.tx_ranges", parts[0]);
  const double stop = parse_value<double>("sweep.tx_ranges", parts[1]);
  const double step = parse_value<double>("sweep.tx_ranges", parts[2]);
  if (step <= 0.0 || stop < start) throw ConfigError("sweep.tx_ranges: empty or non-increasing range");
  std::vector<double> out;
  for (int i = 0; start + i * step <= stop + 1e-9; ++i) out.push_back(start + i * step);
  return out;
}

}  // namespace

ConfigEntries parse_ini(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ConfigEntries out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section + ": field outside a [section]");
    for (const auto& [key, value] : body) out[section + "." + key] = trim(value.data());
  }
  return out;
}

ConfigEntries parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object of sections");
  auto scalar = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  ConfigEntries out;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError(section + ": section must be an object");
    for (const auto& [key, value] : body.items()) {
      if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) joined += (joined.empty() ? "" : " ") + scalar(item);
        out[section + "." + key] = joined;
      } else {
        out[section + "." + key] = scalar(value);
      }
    }
  }
  return out;
}

ConfigEntries load_entries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (path.extension() == ".json" || (first != std::string::npos && text[first] == '{')) return parse_json(text);
  return parse_ini(text);
}

RunSpec run_spec_from(const ConfigEntries& entries) {
  Reader r(entries);
  r.check_known(scenario_keys());
  for (const char* key : {"scenario.lanes", "scenario.nodes_per_lane", "scenario.tx_range_m", "scenario.protocol"}) {
    r.require(key);
  }
  RunSpec spec;
  read_scenario(r, spec.config, spec.n_seeds);
  if (spec.n_seeds == 0) throw ConfigError("scenario.n_seeds: must be at least 1");
  spec.config.validate();
  return spec;
}

SweepSpec sweep_spec_from(const ConfigEntries& entries) {
  Reader r(entries);
  r.check_known(scenario_keys(), &sweep_keys());
  SweepSpec spec = SweepSpec::paper_grid();
  std::uint32_t ignored = 1;
  read_scenario(r, spec.base, ignored);
  if (r.has("sweep.lanes")) spec.lanes = parse_list<std::uint32_t>("sweep.lanes", r.text("sweep.lanes"));
  if (r.has("sweep.nodes_per_lane")) {
    spec.nodes_per_lane = parse_list<std::uint32_t>("sweep.nodes_per_lane", r.text("sweep.nodes_per_lane"));
  }
  if (r.has("sweep.tx_ranges")) spec.tx_ranges = parse_ranges(r.text("sweep.tx_ranges"));
  if (r.has("sweep.protocols")) {
    spec.protocols.clear();
    for (const auto& t : tokens(r.text("sweep.protocols"))) spec.protocols.push_back(parse_protocol(t));
    if (spec.protocols.empty()) throw ConfigError("sweep.protocols: list is empty");
  }
  r.get("sweep.n_seeds", spec.n_seeds);
  if (spec.n_seeds == 0) throw ConfigError("sweep.n_seeds: must be at least 1");
  for (const SweepCell& cell : expand(spec)) cell_config(spec, cell).validate();
  return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) { return run_spec_from(load_entries(path)); }

SweepSpec load_sweep_spec(const std::filesystem::path& path) { return sweep_spec_from(load_entries(path)); }

}  // namespace rnm
