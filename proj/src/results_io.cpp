#include "rnm/results_io.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace rnm {

namespace {

std::string fixed(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string opt(const std::optional<double>& v, int precision) {
  return v && std::isfinite(*v) ? fixed(*v, precision) : std::string{};
}

std::string range_text(double r) {
  // Whole metres print without a fraction.
  return r == std::floor(r) ? std::to_string(static_cast<long long>(r)) : fixed(r, 3);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line, const char* column) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw SchemaError("results.csv line " + std::to_string(line) + ": bad " + column + " '" + text + "'");
  }
  return value;
}

template <typename T>
std::optional<T> parse_optional(const std::string& text, std::size_t line, const char* column) {
  if (text.empty()) return std::nullopt;
  return parse_number<T>(text, line, column);
}

}  // namespace

ResultRow to_result_row(const SweepRow& row) {
  ResultRow r;
  r.lanes = row.cell.lanes;
  r.nodes_per_lane = row.cell.nodes_per_lane;
  r.tx_range_m = row.cell.tx_range_m;
  r.protocol = std::string(to_string(row.cell.protocol));
  r.seeds = row.metrics.seeds;
  if (row.error) return r;
  r.delivery_ratio = row.metrics.delivery_ratio;
  r.mean_retransmitters = row.metrics.mean_retransmitters;
  r.energy_per_delivered = row.metrics.energy_per_delivered;
  r.delay_per_delivered_s = row.metrics.delay_per_delivered;
  r.drops = row.metrics.drops;
  return r;
}

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.lanes << ',' << r.nodes_per_lane << ',' << range_text(r.tx_range_m) << ',' << r.protocol << ','
        << r.seeds << ',' << opt(r.delivery_ratio, 6) << ',' << opt(r.mean_retransmitters, 4) << ','
        << opt(r.energy_per_delivered, 4) << ',' << opt(r.delay_per_delivered_s, 6) << ','
        << (r.drops ? std::to_string(*r.drops) : std::string{}) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("results.csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw SchemaError("results.csv: unexpected header '" + line + "'");

  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 10) {
      throw SchemaError("results.csv line " + std::to_string(line_no) + ": expected 10 columns, got " +
                        std::to_string(f.size()));
    }
    ResultRow r;
    r.lanes = parse_number<std::uint32_t>(f[0], line_no, "lanes");
    r.nodes_per_lane = parse_number<std::uint32_t>(f[1], line_no, "nodes_per_lane");
    r.tx_range_m = parse_number<double>(f[2], line_no, "tx_range_m");
    r.protocol = f[3];
    r.seeds = parse_number<std::uint32_t>(f[4], line_no, "seeds");
    r.delivery_ratio = parse_optional<double>(f[5], line_no, "delivery_ratio");
    r.mean_retransmitters = parse_optional<double>(f[6], line_no, "mean_retransmitters");
    r.energy_per_delivered = parse_optional<double>(f[7], line_no, "energy_per_delivered");
    r.delay_per_delivered_s = parse_optional<double>(f[8], line_no, "delay_per_delivered_s");
    r.drops = parse_optional<std::uint64_t>(f[9], line_no, "drops");
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

// Microseconds at picosecond resolution, so 50e-6 prints as 50.
double to_us(double seconds) { return std::round(seconds * 1e12) / 1e6; }

}  // namespace

nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  return json{
      {"scenario",
       {{"lanes", c.lanes},
        {"lane_width_m", c.lane_width_m},
        {"highway_length_m", c.highway_length_m},
        {"nodes_per_lane", c.nodes_per_lane},
        {"risk_zone", {c.risk_zone.x_min, c.risk_zone.y_min, c.risk_zone.x_max, c.risk_zone.y_max}},
        {"target_zone", {c.target_zone_point.x, c.target_zone_point.y}},
        {"tx_range_m", c.tx_range_m},
        {"protocol", to_string(c.protocol)},
        {"seed", c.rng_seed}}},
      {"radio",
       {{"bandwidth_bps", c.bandwidth_bps},
        {"payload_bytes", c.payload_bytes},
        {"queue_capacity", c.queue_capacity},
        {"collisions", c.collisions},
        {"charge_collided_rx", c.charge_collided_rx}}},
      {"mac",
       {{"slot_us", to_us(c.mac.slot_s)}, {"ifs_us", to_us(c.mac.ifs_s)}, {"contention_window", c.mac.contention_window}}},
      {"protocol", {{"max_wait_s", c.max_wait_s}, {"max_hops", c.max_hops}, {"directions", c.directions}}},
      {"traffic",
       {{"messages_total", c.messages_total},
        {"message_interval_s", c.message_interval_s},
        {"quiescence_s", c.quiescence_s}}},
      {"mobility",
       {{"speed_min_mph", c.mobility.speed_min_mph},
        {"speed_max_mph", c.mobility.speed_max_mph},
        {"min_gap_m", c.mobility.min_gap_m},
        {"tick_s", c.mobility.tick_s},
        {"accel_mps2", c.mobility.accel_mps2},
        {"decel_mps2", c.mobility.decel_mps2},
        {"frozen", c.mobility.frozen}}},
  };
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RunMetrics& m, bool with_messages) {
  nlohmann::json j{
      {"delivery_ratio", m.delivery_ratio},
      {"mean_retransmitters", m.mean_retransmitters},
      {"energy_per_delivered", optional_json(m.mean_energy_per_delivered)},
      {"delay_per_delivered_s", optional_json(m.mean_delay_per_delivered)},
      {"queue_drops", m.queue_drops},
      {"anomalies", m.anomalies},
      {"frames_sent", m.frames_sent},
      {"collided_receptions", m.collided_receptions},
      {"events_processed", m.events_processed},
  };
  if (with_messages) {
    auto& arr = j["messages"] = nlohmann::json::array();
    for (const MessageRecord& r : m.messages) {
      arr.push_back({{"seq", r.seq},
                     {"originated_at", r.originated_at},
                     {"delivered", r.delivered},
                     {"first_arrival_at_target", r.delivered ? nlohmann::json(r.first_arrival_at_target)
                                                             : nlohmann::json(nullptr)},
                     {"hops_at_target", r.hops_at_target},
                     {"retransmitter_count", r.retransmitter_count},
                     {"informed_nodes", r.informed_nodes},
                     {"energy_total", r.energy_total}});
    }
  }
  return j;
}

nlohmann::json to_json(const AveragedMetrics& m, std::uint64_t base_seed) {
  nlohmann::json j{
      {"seeds", m.seeds},
      {"delivery_ratio", m.delivery_ratio},
      {"mean_retransmitters", m.mean_retransmitters},
      {"energy_per_delivered", optional_json(m.energy_per_delivered)},
      {"delay_per_delivered_s", optional_json(m.delay_per_delivered)},
      {"drops", m.drops},
  };
  auto& per_seed = j["per_seed"] = nlohmann::json::array();
  for (std::size_t i = 0; i < m.per_seed.size(); ++i) {
    nlohmann::json s = to_json(m.per_seed[i], true);
    s["seed"] = base_seed + i;
    per_seed.push_back(std::move(s));
  }
  return j;
}

}  // namespace rnm
