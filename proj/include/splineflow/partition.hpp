#pragma once

#include <chrono>
#include <cstddef>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "splineflow/errors.hpp"
#include "splineflow/pipeline.hpp"

namespace splineflow {

enum class PartitionMode { strict, relaxed };

struct Shard {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Contiguous trajectory shards, one per worker: disjoint and covering 0..M.
// Strict mode requires p to divide M; relaxed mode balances within one.
struct Partition {
  std::size_t M = 0;
  unsigned p = 1;
  std::vector<Shard> shards;
};

inline Partition partition(std::size_t m, unsigned p, PartitionMode mode = PartitionMode::strict) {
  if (p < 1 || p > m)
    throw std::invalid_argument("worker count p must satisfy 1 <= p <= M (p = " +
                                std::to_string(p) + ", M = " + std::to_string(m) + ")");
  if (mode == PartitionMode::strict && m % p != 0)
    throw DivisibilityError("strict partitioning requires p to divide M (M = " +
                            std::to_string(m) + ", p = " + std::to_string(p) + ")");
  Partition part;
  part.M = m;
  part.p = p;
  part.shards.reserve(p);
  const std::size_t base = m / p;
  const std::size_t extra = m % p;  // first `extra` shards take one more
  std::size_t at = 0;
  for (unsigned w = 0; w < p; ++w) {
    const std::size_t len = base + (w < extra ? 1 : 0);
    part.shards.push_back({at, at + len});
    at += len;
  }
  return part;
}

// Wall time of the parallel region split into useful kernel time and
// everything else. By construction time_execution = time_cpu + time_overhead
// with time_cpu = (sum of per-worker kernel seconds) / p.
struct TimingBreakdown {
  double time_execution = 0.0;
  double time_cpu = 0.0;
  double time_overhead = 0.0;
  std::vector<double> worker_kernel_s;  // per-worker kernel seconds
  std::vector<double> worker_idle_s;    // wall minus kernel, per worker
};

enum class Stage { fit, eval, pipeline };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::fit: return "fit";
    case Stage::eval: return "eval";
    default: return "pipeline";
  }
}

struct SpmdResult {
  CoeffSet coeffs;
  Snapshot snapshot;  // filled for eval and pipeline stages
  TimingBreakdown timing;
};

namespace detail {

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point t0) {
  return std::chrono::duration<double>(clock::now() - t0).count();
}

}  // namespace detail

// Runs the requested stage over p workers with zero inter-worker
// communication: each worker owns a contiguous trajectory shard and writes
// disjoint result rows. Results are bit-identical for every valid p.
inline SpmdResult run_spmd(const Flow& flow, unsigned p, Stage stage, const FitOptions& opts,
                           std::size_t V, PartitionMode mode = PartitionMode::relaxed) {
  opts.blend.validate();
  const Partition part = partition(flow.trajectory_count(), p, mode);
  const FlowGroups groups = group_flow(flow, opts.grouping);
  const std::size_t n = groups.empty() ? 0 : groups[0].size();

  SpmdResult result;
  result.coeffs = make_empty_coeff_set(flow.trajectory_count(), n, flow.dims, opts);

  // eval-only timing still needs the coefficients; compute them untimed
  if (stage == Stage::eval)
    for (const Shard& s : part.shards) fit_rows(groups, s.begin, s.end, opts, result.coeffs);

  TickMatrix ticks;
  if (stage != Stage::fit) {
    ticks = tick_matrix(V);
    result.snapshot = make_empty_snapshot(result.coeffs, V);
  }

  std::vector<double> kernel_s(p, 0.0);
  std::vector<std::exception_ptr> errors(p);

  const auto region_start = detail::clock::now();
  {
    std::vector<std::thread> workers;
    workers.reserve(p);
    for (unsigned w = 0; w < p; ++w) {
      workers.emplace_back([&, w] {
        const Shard shard = part.shards[w];
        const auto t0 = detail::clock::now();
        try {
          if (stage == Stage::fit || stage == Stage::pipeline)
            fit_rows(groups, shard.begin, shard.end, opts, result.coeffs);
          if (stage == Stage::eval || stage == Stage::pipeline)
            eval_rows(result.coeffs, ticks, shard.begin, shard.end, result.snapshot);
        } catch (...) {
          errors[w] = std::current_exception();
        }
        kernel_s[w] = detail::seconds_since(t0);
      });
    }
    for (auto& t : workers) t.join();
  }
  const double wall = detail::seconds_since(region_start);

  for (unsigned w = 0; w < p; ++w)
    if (errors[w]) {
      try {
        std::rethrow_exception(errors[w]);
      } catch (const std::exception& e) {
        throw std::runtime_error("worker " + std::to_string(w) + " (trajectories " +
                                 std::to_string(part.shards[w].begin) + ".." +
                                 std::to_string(part.shards[w].end) + "): " + e.what());
      }
    }

  result.timing.time_execution = wall;
  result.timing.time_cpu =
      std::accumulate(kernel_s.begin(), kernel_s.end(), 0.0) / static_cast<double>(p);
  result.timing.time_overhead = wall - result.timing.time_cpu;
  result.timing.worker_kernel_s = kernel_s;
  result.timing.worker_idle_s.resize(p);
  for (unsigned w = 0; w < p; ++w) result.timing.worker_idle_s[w] = wall - kernel_s[w];
  return result;
}

struct SpeedupRow {
  unsigned p = 1;
  double time_execution = 0.0;
  double time_cpu = 0.0;
  double time_overhead = 0.0;
  double speedup = 1.0;
};

// One run_spmd per requested worker count; speedup is relative to the first
// entry's wall time. Result data is deterministic; the timing columns are
// measurements on the current host.
inline std::vector<SpeedupRow> speedup_report(const Flow& flow, const std::vector<unsigned>& p_list,
                                              Stage stage, const FitOptions& opts, std::size_t V,
                                              PartitionMode mode = PartitionMode::relaxed) {
  std::vector<SpeedupRow> rows;
  rows.reserve(p_list.size());
  for (unsigned p : p_list) {
    const SpmdResult r = run_spmd(flow, p, stage, opts, V, mode);
    rows.push_back({p, r.timing.time_execution, r.timing.time_cpu, r.timing.time_overhead, 1.0});
  }
  // baseline is the p=1 row when present, the first row otherwise
  double base_wall = rows.empty() ? 0.0 : rows.front().time_execution;
  for (const SpeedupRow& r : rows)
    if (r.p == 1) {
      base_wall = r.time_execution;
      break;
    }
  for (SpeedupRow& r : rows)
    r.speedup = r.p == 1 ? 1.0 : (r.time_execution > 0.0 ? base_wall / r.time_execution : 1.0);
  return rows;
}

}  // namespace splineflow
