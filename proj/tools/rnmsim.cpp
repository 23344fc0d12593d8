#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rnm/config_io.hpp"
#include "rnm/engine.hpp"
#include "rnm/plot.hpp"
#include "rnm/results_io.hpp"
#include "rnm/sweep.hpp"

namespace fs = std::filesystem;
using namespace rnm;

namespace {

constexpr std::uint32_t kPaperScaleMessages = 4000;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> seeds;
  std::optional<std::uint32_t> messages;
  bool paper_scale = false;
  bool no_collisions = false;

  void apply(ScenarioConfig& c) const {
    if (seed) c.rng_seed = *seed;
    if (paper_scale) c.messages_total = kPaperScaleMessages;
    if (messages) c.messages_total = *messages;
    if (no_collisions) c.collisions = false;
  }
};

class TraceWriter : public EngineObserver {
 public:
  TraceWriter(const fs::path& dir, bool mobility, bool frames) {
    if (mobility) {
      mobility_.open(dir / "trace_mobility.csv");
      mobility_ << "time,node_id,x,y,speed\n";
    }
    if (frames) {
      frames_.open(dir / "trace_frames.csv");
      frames_ << "time,tx_node,seq,rx_nodes,collision\n";
    }
  }

  void on_mobility(double time, const MobilityState& state) override {
    if (!mobility_.is_open()) return;
    char buf[128];
    for (const Vehicle& v : state.vehicles) {
      std::snprintf(buf, sizeof buf, "%.3f,%u,%.3f,%.3f,%.4f\n", time, v.node_id, v.position.x, v.position.y,
                    v.speed);
      mobility_ << buf;
    }
  }

  void on_frame_end(const Frame& frame, std::span<const Reception> receptions) override {
    if (!frames_.is_open()) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f,%u,%u,", frame.tx_start, frame.tx_node, frame.msg.sequence_number);
    frames_ << buf;
    bool collided = false;
    bool first = true;
    for (const Reception& r : receptions) {
      if (r.outcome == RxOutcome::Collided) collided = true;
      if (r.outcome != RxOutcome::Received) continue;
      if (!first) frames_ << ';';
      frames_ << r.node;
      first = false;
    }
    frames_ << ',' << (collided ? 1 : 0) << '\n';
  }

 private:
  std::ofstream mobility_;
  std::ofstream frames_;
};

void write_csv(const fs::path& path, std::span<const ResultRow> rows) {
  std::ofstream out(path);
  write_results_csv(out, rows);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

int cmd_run(const fs::path& config_path, const Overrides& ov, const fs::path& out_dir, bool trace_mobility,
            bool trace_frames) {
  RunSpec spec = load_run_spec(config_path);
  ov.apply(spec.config);
  if (ov.seeds) spec.n_seeds = *ov.seeds;
  spec.config.validate();
  fs::create_directories(out_dir);

  std::vector<RunMetrics> runs;
  for (std::uint32_t i = 0; i < spec.n_seeds; ++i) {
    ScenarioConfig c = spec.config;
    c.rng_seed = spec.config.rng_seed + i;
    Simulation sim(c);
    std::optional<TraceWriter> trace;
    if (i == 0 && (trace_mobility || trace_frames)) {
      trace.emplace(out_dir, trace_mobility, trace_frames);
      sim.set_observer(&*trace);
    }
    runs.push_back(sim.run());
  }
  AveragedMetrics avg = average(std::move(runs));

  SweepRow row;
  row.cell = {spec.config.lanes, spec.config.nodes_per_lane, spec.config.tx_range_m, spec.config.protocol};
  row.metrics = avg;
  const ResultRow result = to_result_row(row);
  write_csv(out_dir / "results.csv", std::span(&result, 1));

  nlohmann::json doc;
  doc["config"] = to_json(spec.config);
  doc["metrics"] = to_json(avg, spec.config.rng_seed);
  std::ofstream(out_dir / "run.json") << doc.dump(2) << '\n';

  std::cout << "delivery_ratio=" << avg.delivery_ratio << " mean_retransmitters=" << avg.mean_retransmitters
            << " drops=" << avg.drops << '\n';
  return 0;
}

int cmd_sweep(const std::optional<fs::path>& config_path, const Overrides& ov, const fs::path& out_dir,
              bool serial, int threads) {
  SweepSpec spec = config_path ? load_sweep_spec(*config_path) : SweepSpec::paper_grid();
  ov.apply(spec.base);
  if (ov.seeds) spec.n_seeds = *ov.seeds;
  for (const SweepCell& cell : expand(spec)) cell_config(spec, cell).validate();
  fs::create_directories(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SweepRow> rows = serial ? run_sweep_serial(spec) : run_sweep_parallel(spec, threads);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<ResultRow> out;
  std::ofstream errors(out_dir / "errors.txt");
  std::size_t failed = 0;
  for (const SweepRow& r : rows) {
    out.push_back(to_result_row(r));
    if (r.error) {
      ++failed;
      errors << r.cell.lanes << ',' << r.cell.nodes_per_lane << ',' << r.cell.tx_range_m << ','
             << to_string(r.cell.protocol) << ": " << *r.error << '\n';
    }
  }
  write_csv(out_dir / "results.csv", out);

  nlohmann::json doc;
  doc["base_config"] = to_json(spec.base);
  doc["n_seeds"] = spec.n_seeds;
  doc["cells"] = rows.size();
  doc["failed_cells"] = failed;
  doc["elapsed_s"] = elapsed;
  doc["mode"] = serial ? "serial" : "parallel";
  std::ofstream(out_dir / "sweep.json") << doc.dump(2) << '\n';

  std::cout << rows.size() << " cells, " << failed << " failed, " << elapsed << " s\n";
  return failed == 0 ? 0 : 3;
}

int cmd_plot(const fs::path& results, const fs::path& out_dir) {
  std::ifstream in(results);
  if (!in) throw std::runtime_error(results.string() + ": cannot open");
  const std::vector<ResultRow> rows = read_results_csv(in);
  const auto files = write_metric_charts(rows, out_dir);
  std::cout << files.size() << " charts written to " << out_dir.string() << '\n';
  return 0;
}

int cmd_validate(const fs::path& config_path, bool as_sweep) {
  if (as_sweep) {
    const SweepSpec spec = load_sweep_spec(config_path);
    std::cout << "ok: " << expand(spec).size() << " cells x " << spec.n_seeds << " seeds\n";
  } else {
    const RunSpec spec = load_run_spec(config_path);
    spec.config.validate();
    std::cout << "ok\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-notification dissemination simulator"};
  app.require_subcommand(1);

  Overrides ov;
  fs::path out_dir = "out";
  bool trace_mobility = false, trace_frames = false, serial = false, as_sweep = false;
  int threads = 0;
  fs::path config_path, results_path;
  std::optional<fs::path> sweep_config;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", ov.seed, "Base RNG seed");
    sub->add_option("--seeds", ov.seeds, "Number of seeds to average");
    sub->add_option("--messages", ov.messages, "Messages originated per run");
    sub->add_flag("--paper-scale", ov.paper_scale, "Originate 4000 messages per run");
    sub->add_flag("--no-collisions", ov.no_collisions, "Disable the collision model");
    sub->add_option("--out", out_dir, "Output directory");
  };

  CLI::App* run = app.add_subcommand("run", "Simulate one scenario");
  run->add_option("config", config_path, "Scenario file (INI or JSON)")->required();
  add_common(run);
  run->add_flag("--trace-mobility", trace_mobility, "Write trace_mobility.csv for the first seed");
  run->add_flag("--trace-frames", trace_frames, "Write trace_frames.csv for the first seed");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter grid (default: full grid)");
  sweep->add_option("config", sweep_config, "Sweep file (INI or JSON)");
  add_common(sweep);
  sweep->add_flag("--serial", serial, "Use the single-threaded reference sweep");
  sweep->add_option("--threads", threads, "OpenMP threads (0 = default)");

  CLI::App* plot = app.add_subcommand("plot", "Render SVG charts from results.csv");
  plot->add_option("results", results_path, "results.csv")->required();
  plot->add_option("--out", out_dir, "Output directory");

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario or sweep file");
  validate->add_option("config", config_path, "File to check")->required();
  validate->add_flag("--sweep", as_sweep, "Treat the file as a sweep file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, ov, out_dir, trace_mobility, trace_frames);
    if (*sweep) return cmd_sweep(sweep_config, ov, out_dir, serial, threads);
    if (*plot) return cmd_plot(results_path, out_dir);
    if (*validate) return cmd_validate(config_path, as_sweep);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
