#include "rnm/sweep.hpp"

#include <algorithm>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rnm {

SweepSpec SweepSpec::paper_grid() {
  SweepSpec spec;
  for (int r = 250; r <= 1000; r += 50) spec.tx_ranges.push_back(r);
  return spec;
}

std::vector<SweepCell> expand(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  for (auto lanes : spec.lanes)
    for (auto nodes : spec.nodes_per_lane)
      for (double range : spec.tx_ranges)
        for (auto protocol : spec.protocols) cells.push_back({lanes, nodes, range, protocol});
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

ScenarioConfig cell_config(const SweepSpec& spec, const SweepCell& cell) {
  ScenarioConfig c = spec.base;
  c.lanes = cell.lanes;
  c.nodes_per_lane = cell.nodes_per_lane;
  c.tx_range_m = cell.tx_range_m;
  c.protocol = cell.protocol;
  return c;
}

namespace {

struct Job {
  std::size_t cell = 0;
  std::uint32_t seed_offset = 0;
};

struct JobResult {
  std::optional<RunMetrics> metrics;
  std::string error;
};

JobResult run_job(const SweepSpec& spec, const SweepCell& cell, std::uint32_t seed_offset) {
  JobResult out;
  try {
    ScenarioConfig c = cell_config(spec, cell);
    c.rng_seed = spec.base.rng_seed + seed_offset;
    out.metrics = run(c);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<Job> jobs_for(std::size_t cell_count, std::uint32_t n_seeds) {
  std::vector<Job> jobs;
  jobs.reserve(cell_count * n_seeds);
  for (std::size_t c = 0; c < cell_count; ++c)
    for (std::uint32_t s = 0; s < n_seeds; ++s) jobs.push_back({c, s});
  return jobs;
}

// Results are slotted by job index, so the merge is independent of which
// thread finished first.
std::vector<SweepRow> merge(const std::vector<SweepCell>& cells, std::uint32_t n_seeds,
                            std::vector<JobResult>& results) {
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepRow row;
    row.cell = cells[c];
    std::vector<RunMetrics> runs;
    for (std::uint32_t s = 0; s < n_seeds; ++s) {
      JobResult& r = results[c * n_seeds + s];
      if (!r.metrics) {
        if (!row.error) row.error = r.error;
        continue;
      }
      runs.push_back(std::move(*r.metrics));
    }
    if (!row.error) row.metrics = average(std::move(runs));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec) {
  const auto cells = expand(spec);
  const auto jobs = jobs_for(cells.size(), spec.n_seeds);
  std::vector<JobResult> results(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    results[j] = run_job(spec, cells[jobs[j].cell], jobs[j].seed_offset);
  }
  return merge(cells, spec.n_seeds, results);
}

std::vector<SweepRow> run_sweep_parallel(const SweepSpec& spec, int threads) {
  const auto cells = expand(spec);
  const auto jobs = jobs_for(cells.size(), spec.n_seeds);
  std::vector<JobResult> results(jobs.size());
  const auto n = static_cast<long>(jobs.size());
#ifdef _OPENMP
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
#else
  (void)threads;
#endif
  for (long j = 0; j < n; ++j) {
    results[j] = run_job(spec, cells[jobs[j].cell], jobs[j].seed_offset);
  }
  return merge(cells, spec.n_seeds, results);
}

}  // namespace rnm
