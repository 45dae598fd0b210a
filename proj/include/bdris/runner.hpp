#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/results_io.hpp"

namespace bdris {

enum class SweepKind { position_grid, m_sweep, pt_sweep, convergence_trace, runtime_bench };
enum class Stage1Kind { none, mo, rtp, group, diag, joint };
enum class Stage2Kind { svd, minil, maxsinr, maxsr };

SweepKind parse_sweep_kind(const std::string& text);
std::string to_string(SweepKind kind);

struct Stage1Choice {
  Stage1Kind kind = Stage1Kind::mo;
  int group_size = 0;  // group only
};

/// "none", "mo", "rtp", "group:<Mg>", "diag" or "joint".
Stage1Choice parse_stage1(const std::string& text);
std::string to_string(const Stage1Choice& choice);
Stage2Kind parse_stage2(const std::string& text);
std::string to_string(Stage2Kind kind);

struct SweepSpec {
  SweepKind kind = SweepKind::m_sweep;
  std::vector<double> values;                 // M or P_t [dBm] per point
  std::vector<std::array<double, 2>> grid;    // (x, y) RIS positions
  Stage1Choice stage1;
  Stage2Kind stage2 = Stage2Kind::maxsr;
  int trials = 20;
  std::uint64_t seed = 1;
  unsigned threads = 0;                       // 0: hardware concurrency
  int repeats = 3;                            // runtime_bench
  int trace_iters = 500;                      // convergence_trace MO budget

  /// Throws InvalidConfig on an inconsistent spec.
  void validate() const;
  std::size_t point_count() const;
};

/// RIS positions 5, 5 + step, ... up to side - 5 in both x and y.
std::vector<std::array<double, 2>> position_grid(double side, double step);

/// Default sweep values for a kind, taken from the scenario where possible.
SweepSpec default_sweep(SweepKind kind, const ScenarioConfig& config, double grid_step = 5.0);

/// Seed of trial `trial` at sweep point `point`; independent of execution order.
std::uint64_t trial_seed(std::uint64_t master, std::size_t point, int trial);

/// Runs every (point, trial) on a worker pool; rows come back sorted by point
/// then trial. Solver failures are recorded in the row status.
ResultTable run_sweep(const ScenarioConfig& config, const SweepSpec& sweep);

}  // namespace bdris
