// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "rnm/protocols.hpp"
#include "rnm/results_io.hpp"
#include "rnm/sweep.hpp"
#include "support.hpp"

using namespace rnm;
using namespace testing_support;

namespace {

constexpr std::uint32_t kDeskMessages = 100;
constexpr std::uint32_t kDeskSeeds = 5;
constexpr double kDeliveredThreshold = 0.99;

int failures = 0;

void report(const char* id, bool pass, const std::string& detail, double seconds) {
  std::printf("%s %s (%.2f s) %s\n", id, pass ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// --- desk-scale grid, shared by AC4..AC9 -------------------------------------

struct Grid {
  std::vector<SweepRow> rows;
  std::string csv;
  double seconds = 0.0;

  const SweepRow* find(std::uint32_t lanes, std::uint32_t nodes, double range, ProtocolKind p) const {
    for (const SweepRow& r : rows) {
      if (r.cell.lanes == lanes && r.cell.nodes_per_lane == nodes && r.cell.tx_range_m == range &&
          r.cell.protocol == p) {
        return &r;
      }
    }
    return nullptr;
  }
};

SweepSpec desk_spec() {
  SweepSpec s = SweepSpec::paper_grid();
  s.n_seeds = kDeskSeeds;
  s.base.messages_total = kDeskMessages;
  return s;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::vector<ResultRow> out;
  for (const SweepRow& r : rows) out.push_back(to_result_row(r));
  std::ostringstream os;
  write_results_csv(os, out);
  return os.str();
}

Grid run_grid(bool serial) {
  Grid g;
  const auto t0 = std::chrono::steady_clock::now();
  g.rows = serial ? run_sweep_serial(desk_spec()) : run_sweep_parallel(desk_spec());
  g.seconds = since(t0);
  g.csv = to_csv(g.rows);
  return g;
}

std::string cell_name(const SweepCell& c) {
  return "L" + std::to_string(c.lanes) + "/N" + std::to_string(c.nodes_per_lane) + "/R" +
         std::to_string(static_cast<int>(c.tx_range_m));
}

// --- criteria ---------------------------------------------------------------

void ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = rnmdp_wait_time(1000, 1000, true, 1.0) == 0.0 && rnmdp_wait_time(0, 1000, true, 1.0) == 0.5 &&
            rnmdp_wait_time(1000, 1000, false, 1.0) == 0.5 && rnmdp_wait_time(0, 1000, false, 1.0) == 1.0;
  const double e250 = tx_energy(250), e1000 = tx_energy(1000);
  ok = ok && std::abs(e250 - 1.39945) <= 1e-9 && std::abs(e1000 - 73.1182) <= 1e-9;
  report("AC1", ok,
         "wait(0,.5,.5,1) exact; tx_energy(250)=" + fmt(e250, 9) + " tx_energy(1000)=" + fmt(e1000, 9),
         since(t0));
}

std::vector<Topology> acceptance_topologies() { return random_topologies(20, 20240601); }

void ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  int matched = 0, chain_total = 0;
  std::string first_mismatch;
  for (const Topology& t : acceptance_topologies()) {
    ScenarioConfig c = static_config(t, ProtocolKind::Rnmdp, 3);
    Simulation sim(c, static_line(t.ys, c));
    const CheckedRun r = checked_run(sim, c);

    auto pts = oracle_points(t, c);
    const oracle::Point src = pts[0];
    pts.erase(pts.begin());
    std::set<NodeId> expected;
    for (std::size_t i : oracle::greedy_furthest_chain(src, pts, 0, c.tx_range_m, c.max_hops)) {
      expected.insert(static_cast<NodeId>(i + 1));
    }
    bool all = r.violations.empty();
    for (std::uint32_t seq = 1; seq <= c.messages_total; ++seq) {
      const auto it = r.relays.find(seq);
      all = all && (it == r.relays.end() ? std::set<NodeId>{} : it->second) == expected;
    }
    chain_total += static_cast<int>(expected.size());
    if (all) {
      ++matched;
    } else if (first_mismatch.empty()) {
      first_mismatch = " first mismatch: n=" + std::to_string(t.ys.size()) + " R=" + fmt(t.range, 0);
    }
  }
  report("AC2", matched == 20 && since(t0) < 10.0,
         std::to_string(matched) + "/20 topologies match the greedy chain (" + std::to_string(chain_total) +
             " relays total)" + first_mismatch,
         since(t0));
}

void ac3() {
  const auto t0 = std::chrono::steady_clock::now();
  int agree = 0, runs = 0, connected = 0;
  for (const Topology& t : acceptance_topologies()) {
    for (ProtocolKind p : {ProtocolKind::Rnmdp, ProtocolKind::Flooding}) {
      ScenarioConfig c = static_config(t, p, 3);
      Simulation sim(c, static_line(t.ys, c));
      const RunMetrics m = sim.run();
      const auto pts = oracle_points(t, c);
      std::vector<bool> relays(pts.size(), true);
      relays[Simulation::kObserver] = false;
      const auto hops =
          oracle::bfs_hops(pts, Simulation::kInitiator, Simulation::kObserver, relays, c.tx_range_m);
      const bool expect = hops && *hops <= c.max_hops;
      const double want = expect ? 1.0 : 0.0;
      ++runs;
      if (expect && p == ProtocolKind::Rnmdp) ++connected;
      if (m.delivery_ratio == want) ++agree;
    }
  }
  report("AC3", agree == runs && since(t0) < 10.0,
         std::to_string(agree) + "/" + std::to_string(runs) + " runs agree with BFS (" + std::to_string(connected) +
             "/20 topologies connected)",
         since(t0));
}

void ac4(const Grid& g) {
  double worst = 0.0;
  int bad = 0, cells = 0;
  std::string worst_cell;
  for (const SweepRow& r : g.rows) {
    if (r.cell.protocol != ProtocolKind::Rnmdp) continue;
    const SweepRow* f =
        g.find(r.cell.lanes, r.cell.nodes_per_lane, r.cell.tx_range_m, ProtocolKind::Flooding);
    if (!f) continue;
    ++cells;
    const double d = std::abs(r.metrics.delivery_ratio - f->metrics.delivery_ratio);
    if (d > 0.02 + 1e-12) ++bad;
    if (d > worst) {
      worst = d;
      worst_cell = cell_name(r.cell) + " rnmdp=" + fmt(r.metrics.delivery_ratio, 3) +
                   " flooding=" + fmt(f->metrics.delivery_ratio, 3);
    }
  }
  report("AC4", bad == 0 && cells == 96,
         std::to_string(cells - bad) + "/" + std::to_string(cells) + " cells within 0.02; worst " + fmt(worst, 3) +
             " at " + worst_cell,
         0.0);
}

void ac5(const Grid& g) {
  int cells = 0, retrans_bad = 0, energy_bad = 0;
  std::string example;
  for (const SweepRow& r : g.rows) {
    if (r.cell.protocol != ProtocolKind::Rnmdp) continue;
    const SweepRow* f = g.find(r.cell.lanes, r.cell.nodes_per_lane, r.cell.tx_range_m, ProtocolKind::Flooding);
    if (!r.metrics.energy_per_delivered || !f->metrics.energy_per_delivered) continue;
    ++cells;
    if (r.metrics.mean_retransmitters > f->metrics.mean_retransmitters) {
      ++retrans_bad;
      if (example.empty()) example = " e.g. retrans at " + cell_name(r.cell);
    }
    if (!(*r.metrics.energy_per_delivered < *f->metrics.energy_per_delivered)) {
      ++energy_bad;
      if (example.empty()) example = " e.g. energy at " + cell_name(r.cell);
    }
  }
  // Doubling from one to two lanes, where both lane counts deliver fully.
  int pairs = 0, out_of_band = 0;
  double lo = INFINITY, hi = -INFINITY;
  for (std::uint32_t n : {30u, 45u, 60u}) {
    for (double range = 250; range <= 1000; range += 50) {
      const SweepRow* one = g.find(1, n, range, ProtocolKind::Flooding);
      const SweepRow* two = g.find(2, n, range, ProtocolKind::Flooding);
      if (one->metrics.delivery_ratio < kDeliveredThreshold || two->metrics.delivery_ratio < kDeliveredThreshold) {
        continue;
      }
      ++pairs;
      const double ratio = two->metrics.mean_retransmitters / one->metrics.mean_retransmitters;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      if (ratio < 1.8 || ratio > 2.2) ++out_of_band;
    }
  }
  const bool ok = retrans_bad == 0 && energy_bad == 0 && pairs > 0 && out_of_band == 0;
  report("AC5", ok,
         "dominance in " + std::to_string(cells - std::max(retrans_bad, energy_bad)) + "/" + std::to_string(cells) +
             " delivering cells" + example + "; flooding 2-lane/1-lane retransmitters in [" + fmt(lo, 3) + ", " +
             fmt(hi, 3) + "] over " + std::to_string(pairs) + " saturated (density, range) pairs",
         0.0);
}

std::optional<double> threshold_range(const Grid& g, std::uint32_t nodes, ProtocolKind p) {
  for (double range = 250; range <= 1000; range += 50) {
    if (g.find(1, nodes, range, p)->metrics.delivery_ratio >= kDeliveredThreshold) return range;
  }
  return std::nullopt;
}

void ac6(const Grid& g) {
  bool ok = g.seconds < 600.0;
  std::string detail;
  struct Want {
    std::uint32_t nodes;
    double lo, hi;
  };
  for (Want w : {Want{60, 350, 500}, Want{45, 700, 900}}) {
    for (ProtocolKind p : {ProtocolKind::Rnmdp, ProtocolKind::Flooding}) {
      const auto r = threshold_range(g, w.nodes, p);
      const bool in = r && *r >= w.lo && *r <= w.hi;
      ok = ok && in;
      detail += "N" + std::to_string(w.nodes) + " " + std::string(to_string(p)) + " first>=0.99 at " +
                (r ? fmt(*r, 0) : std::string("none")) + " m [" + fmt(w.lo, 0) + "," + fmt(w.hi, 0) + "]; ";
    }
  }
  report("AC6", ok, detail + "desk sweep " + fmt(g.seconds, 1) + " s", g.seconds);
}

void ac7(const Grid& g) {
  const double ranges[] = {250, 500, 1000};
  const double reported[] = {5.79, 2.16, 0.96};
  double d[3];
  bool have = true;
  for (int i = 0; i < 3; ++i) {
    const auto& v = g.find(1, 60, ranges[i], ProtocolKind::Rnmdp)->metrics.delay_per_delivered;
    have = have && v.has_value();
    d[i] = v.value_or(NAN);
  }
  const bool monotone = have && d[0] > d[1] && d[1] > d[2];
  std::string band;
  for (int i = 0; i < 3; ++i) {
    const bool in = std::abs(d[i] - reported[i]) <= 0.5 * reported[i];
    band += fmt(ranges[i], 0) + "m " + fmt(d[i], 3) + " s vs " + fmt(reported[i], 2) + (in ? " in" : " OUT") + " band; ";
  }
  report("AC7", monotone, std::string(monotone ? "strictly decreasing; " : "NOT strictly decreasing; ") +
                              "advisory +-50%: " + band,
         0.0);
}

void ac8(const Grid& g) {
  bool ok = true;
  std::string detail;
  for (double range : {900.0, 950.0, 1000.0}) {
    const auto& r = g.find(2, 60, range, ProtocolKind::Rnmdp)->metrics.energy_per_delivered;
    const auto& f = g.find(2, 60, range, ProtocolKind::Flooding)->metrics.energy_per_delivered;
    if (!r || !f) {
      ok = false;
      detail += fmt(range, 0) + "m no deliveries; ";
      continue;
    }
    const double ratio = *r / *f;
    ok = ok && ratio >= 0.05 && ratio <= 0.20;
    detail += fmt(range, 0) + "m " + fmt(ratio, 4) + "; ";
  }
  report("AC8", ok, "RNMDP/flooding energy per delivered, 2 lanes, 60/lane: " + detail + "band [0.05, 0.20]", 0.0);
}

void ac9(const Grid& first) {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid again = run_grid(false);
  const Grid serial = run_grid(true);
  const bool ok = first.csv == again.csv && first.csv == serial.csv;
  report("AC9", ok,
         std::string("parallel run 2 ") + (first.csv == again.csv ? "identical" : "DIFFERS") +
             ", serial reference " + (first.csv == serial.csv ? "identical" : "DIFFERS") + " (" +
             std::to_string(first.csv.size()) + " bytes)",
         since(t0));
}

void ac10() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(99);
  const double ranges[] = {250, 300, 350, 400, 450, 500, 550, 600, 650, 700, 750, 800, 850, 900, 950, 1000};
  const std::uint32_t densities[] = {30, 45, 60};
  int clean = 0;
  std::string first_violation;
  std::uint64_t frames = 0, samples = 0;
  for (int i = 0; i < 50; ++i) {
    ScenarioConfig c;
    c.lanes = 1 + static_cast<std::uint32_t>(gen() % 2);
    c.nodes_per_lane = densities[gen() % 3];
    c.tx_range_m = ranges[gen() % 16];
    c.protocol = gen() % 2 ? ProtocolKind::Rnmdp : ProtocolKind::Flooding;
    c.rng_seed = 1 + gen() % 1000;
    c.messages_total = kDeskMessages;
    InvariantObserver obs(c);
    Simulation sim(c);
    sim.set_observer(&obs);
    const RunMetrics m = sim.run();
    obs.finish(m);
    frames += obs.frames_started;
    samples += obs.mobility_samples;
    if (obs.ok()) {
      ++clean;
    } else if (first_violation.empty()) {
      first_violation = "; run " + std::to_string(i) + ": " + obs.violations.front();
    }
  }
  report("AC10", clean == 50,
         std::to_string(clean) + "/50 randomized runs satisfy latch, hop, queue, energy, density and order "
                                 "invariants (" +
             std::to_string(frames) + " frames, " + std::to_string(samples) + " mobility samples)" +
             first_violation,
         since(t0));
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  const Grid grid = run_grid(false);
  ac4(grid);
  ac5(grid);
  ac6(grid);
  ac7(grid);
  ac8(grid);
  ac9(grid);
  ac10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
