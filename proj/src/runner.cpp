#include "bdris/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <thread>

#include "bdris/joint.hpp"
#include "bdris/leakage.hpp"
#include "bdris/metrics.hpp"
#include "bdris/precoders.hpp"
#include "bdris/ris_solvers.hpp"

namespace bdris {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Stage1Output {
  Matrix theta;
  IterTrace trace;
  int iterations = 0;
  bool has_beamformers = false;
  Beamformers beamformers;
};

Stage1Output run_stage1(const ChannelSet& ch, const ScenarioConfig& cfg,
                        const Stage1Choice& choice, std::uint64_t solver_seed,
                        int mo_iters, double mo_rel_tol) {
  OptimizerOptions opts;
  opts.seed = solver_seed;
  if (mo_iters > 0) opts.max_iters = mo_iters;
  if (mo_rel_tol >= 0.0) opts.rel_tol = mo_rel_tol;
  const Index m = ch.elements();
  Stage1Output out;
  switch (choice.kind) {
    case Stage1Kind::none: {
      out.theta = Matrix::Zero(m, m);
      out.trace.il_values.push_back(interference_leakage(ch, out.theta));
      break;
    }
    case Stage1Kind::mo: {
      MoResult r = minimize_il_mo(ch, opts);
      out.theta = std::move(r.theta.theta);
      out.trace = std::move(r.trace);
      break;
    }
    case Stage1Kind::rtp: {
      RtpResult r = minimize_il_rtp(ch, opts);
      out.theta = std::move(r.theta.theta);
      out.trace.il_values = {r.relaxed.il, r.projected_il};
      out.trace.iterations = r.relaxed.bisection_steps;
      break;
    }
    case Stage1Kind::group: {
      GroupResult r = minimize_il_group(ch, choice.group_size, InnerSolver::mo, opts);
      out.theta = std::move(r.theta.theta);
      out.trace = std::move(r.trace);
      break;
    }
    case Stage1Kind::diag: {
      DiagResult r = minimize_il_diag(ch, opts);
      out.theta = std::move(r.theta.theta);
      out.trace = std::move(r.trace);
      break;
    }
    case Stage1Kind::joint: {
      JointOptions jo;
      jo.mo = opts;
      JointResult r = joint_min_il(ch, cfg.streams, cfg.pt_mw(), jo);
      out.theta = std::move(r.theta.theta);
      out.trace = std::move(r.trace);
      out.has_beamformers = true;
      out.beamformers = std::move(r.beamformers);
      break;
    }
  }
  out.iterations = out.trace.iterations;
  return out;
}

Architecture stage1_architecture(Stage1Kind kind) {
  switch (kind) {
    case Stage1Kind::group: return Architecture::group;
    case Stage1Kind::diag: return Architecture::diagonal;
    default: return Architecture::fully;
  }
}

// Empty when every output meets its constraints.
std::string check_outputs(const Stage1Choice& choice, const Matrix& theta,
                          const Beamformers& bf, double p_t) {
  if (choice.kind != Stage1Kind::none) {
    const ScatteringMatrix s{theta, stage1_architecture(choice.kind),
                             static_cast<Index>(choice.group_size)};
    const double defect = feasibility_defect(s);
    if (!(defect <= kUnitaryTol)) return "infeasible theta: defect " + format_value(defect);
  }
  for (std::size_t k = 0; k < bf.v.size(); ++k) {
    if (!(bf.v[k].squaredNorm() <= p_t * (1.0 + kUnitaryTol))) {
      return "precoder " + std::to_string(k + 1) + " exceeds the power budget";
    }
    const Matrix& u = bf.u[k];
    const double gram = (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
    if (!(gram <= kUnitaryTol)) return "decoder " + std::to_string(k + 1) + " is not orthonormal";
  }
  return {};
}

Beamformers run_stage2(const LinkMatrices& eff, const ScenarioConfig& cfg, Stage2Kind kind,
                       double sigma2) {
  const double p_t = cfg.pt_mw();
  const Index d = cfg.streams;
  switch (kind) {
    case Stage2Kind::svd:
      return svd_precoders(eff, p_t, sigma2, d).beamformers;
    case Stage2Kind::minil:
      return min_il_beamformers(eff, d, p_t, 200).beamformers;
    case Stage2Kind::maxsinr:
      return max_sinr_beamformers(eff, d, p_t, sigma2, 200).beamformers;
    case Stage2Kind::maxsr: {
      const auto init = svd_precoders(eff, p_t, sigma2, d).beamformers.v;
      return max_sr_beamformers(eff, init, p_t, sigma2, 300).beamformers;
    }
  }
  throw ContractViolation("run_stage2: unknown precoder");
}

ScenarioConfig point_config(const ScenarioConfig& base, const SweepSpec& sweep,
                            std::size_t point, std::string& label) {
  ScenarioConfig cfg = base;
  switch (sweep.kind) {
    case SweepKind::position_grid: {
      const auto& xy = sweep.grid[point];
      cfg.ris_position[0] = xy[0];
      cfg.ris_position[1] = xy[1];
      label = format_value(xy[0]) + ":" + format_value(xy[1]);
      break;
    }
    case SweepKind::m_sweep:
    case SweepKind::runtime_bench:
      cfg.elements = static_cast<int>(std::lround(sweep.values[point]));
      label = std::to_string(cfg.elements);
      break;
    case SweepKind::pt_sweep:
      cfg.pt_dbm = sweep.values[point];
      label = format_value(cfg.pt_dbm);
      break;
    case SweepKind::convergence_trace:
      label = "0";
      break;
  }
  if (sweep.stage1.kind == Stage1Kind::group) {
    cfg.architecture = Architecture::group;
    cfg.group_size = sweep.stage1.group_size;
  } else if (sweep.stage1.kind == Stage1Kind::diag) {
    cfg.architecture = Architecture::diagonal;
  }
  return cfg;
}

ResultRow base_row(const SweepSpec& sweep, const ScenarioConfig& cfg, const std::string& label,
                   int trial, std::uint64_t seed) {
  ResultRow row;
  row.sweep_kind = to_string(sweep.kind);
  row.sweep_value = label;
  row.trial = trial;
  row.seed = seed;
  row.stage1 = to_string(sweep.stage1);
  row.stage2 = sweep.stage1.kind == Stage1Kind::joint ? "joint" : to_string(sweep.stage2);
  row.m = cfg.elements;
  row.mg = sweep.stage1.kind == Stage1Kind::group ? sweep.stage1.group_size : 0;
  row.pt_dbm = cfg.pt_dbm;
  row.rates.assign(static_cast<std::size_t>(cfg.users), kNaN);
  row.il = row.delta_inr_db = row.sum_rate = kNaN;
  return row;
}

std::vector<ResultRow> run_trial(const ScenarioConfig& base, const SweepSpec& sweep,
                                 std::size_t point, int trial) {
  std::string label;
  const ScenarioConfig cfg = point_config(base, sweep, point, label);
  const std::uint64_t seed = trial_seed(sweep.seed, point, trial);
  ResultRow row = base_row(sweep, cfg, label, trial, seed);
  try {
    std::mt19937_64 rng(seed);
    const ChannelSet ch = draw_channels(cfg, rng);
    const std::uint64_t solver_seed = rng();
    const double direct = direct_leakage(ch);

    if (sweep.kind == SweepKind::convergence_trace) {
      const auto t0 = Clock::now();
      const Stage1Output s1 = run_stage1(ch, cfg, sweep.stage1, solver_seed,
                                         sweep.trace_iters, 0.0);
      const double wall = ms_since(t0);
      std::vector<ResultRow> rows;
      for (std::size_t i = 0; i < s1.trace.il_values.size(); ++i) {
        ResultRow r = row;
        r.sweep_value = std::to_string(i);
        r.stage2 = "none";
        r.il = s1.trace.il_values[i];
        r.delta_inr_db = 10.0 * std::log10(r.il / direct);
        r.iters_stage1 = s1.iterations;
        r.wall_ms_stage1 = wall;
        r.wall_ms_stage2 = 0.0;
        rows.push_back(std::move(r));
      }
      return rows;
    }

    const int repeats = sweep.kind == SweepKind::runtime_bench ? sweep.repeats : 1;
    std::vector<double> walls;
    Stage1Output s1;
    for (int rep = 0; rep < repeats; ++rep) {
      const auto t0 = Clock::now();
      s1 = run_stage1(ch, cfg, sweep.stage1, solver_seed, 0, -1.0);
      walls.push_back(ms_since(t0));
    }
    std::sort(walls.begin(), walls.end());
    row.wall_ms_stage1 = walls[walls.size() / 2];
    row.iters_stage1 = s1.iterations;
    row.il = interference_leakage(ch, s1.theta);
    row.delta_inr_db = 10.0 * std::log10(row.il / direct);

    const auto t1 = Clock::now();
    const LinkMatrices eff = effective_channels(ch, s1.theta);
    const Beamformers bf = s1.has_beamformers
                               ? s1.beamformers
                               : run_stage2(eff, cfg, sweep.stage2, ch.noise_power);
    row.rates = user_rates(eff, bf, ch.noise_power);
    row.wall_ms_stage2 = ms_since(t1);
    if (std::string bad = check_outputs(sweep.stage1, s1.theta, bf, cfg.pt_mw()); !bad.empty()) {
      row.status = std::move(bad);
    }
    row.sum_rate = make_trial_result(row.il, row.delta_inr_db, row.rates).sum_rate;
  } catch (const std::exception& e) {
    row.status = e.what();
  }
  return {row};
}

}  // namespace

SweepKind parse_sweep_kind(const std::string& text) {
  if (text == "position_grid") return SweepKind::position_grid;
  if (text == "m_sweep") return SweepKind::m_sweep;
  if (text == "pt_sweep") return SweepKind::pt_sweep;
  if (text == "convergence_trace") return SweepKind::convergence_trace;
  if (text == "runtime_bench") return SweepKind::runtime_bench;
  throw InvalidConfig("unknown sweep '" + text +
                      "' (position_grid|m_sweep|pt_sweep|convergence_trace|runtime_bench)");
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::position_grid: return "position_grid";
    case SweepKind::m_sweep: return "m_sweep";
    case SweepKind::pt_sweep: return "pt_sweep";
    case SweepKind::convergence_trace: return "convergence_trace";
    case SweepKind::runtime_bench: return "runtime_bench";
  }
  return "?";
}

Stage1Choice parse_stage1(const std::string& text) {
  Stage1Choice c;
  if (text == "none") c.kind = Stage1Kind::none;
  else if (text == "mo") c.kind = Stage1Kind::mo;
  else if (text == "rtp") c.kind = Stage1Kind::rtp;
  else if (text == "diag") c.kind = Stage1Kind::diag;
  else if (text == "joint") c.kind = Stage1Kind::joint;
  else if (text.rfind("group:", 0) == 0) {
    c.kind = Stage1Kind::group;
    const std::string n = text.substr(6);
    if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidConfig("group size in '" + text + "' must be a positive integer");
    }
    c.group_size = std::stoi(n);
    if (c.group_size < 1) throw InvalidConfig("group size must be >= 1");
  } else {
    throw InvalidConfig("unknown stage1 '" + text + "' (none|mo|rtp|group:<Mg>|diag|joint)");
  }
  return c;
}

std::string to_string(const Stage1Choice& c) {
  switch (c.kind) {
    case Stage1Kind::none: return "none";
    case Stage1Kind::mo: return "mo";
    case Stage1Kind::rtp: return "rtp";
    case Stage1Kind::group: return "group:" + std::to_string(c.group_size);
    case Stage1Kind::diag: return "diag";
    case Stage1Kind::joint: return "joint";
  }
  return "?";
}

Stage2Kind parse_stage2(const std::string& text) {
  if (text == "svd") return Stage2Kind::svd;
  if (text == "minil") return Stage2Kind::minil;
  if (text == "maxsinr") return Stage2Kind::maxsinr;
  if (text == "maxsr") return Stage2Kind::maxsr;
  throw InvalidConfig("unknown stage2 '" + text + "' (svd|minil|maxsinr|maxsr)");
}

std::string to_string(Stage2Kind kind) {
  switch (kind) {
    case Stage2Kind::svd: return "svd";
    case Stage2Kind::minil: return "minil";
    case Stage2Kind::maxsinr: return "maxsinr";
    case Stage2Kind::maxsr: return "maxsr";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (trials < 1) throw InvalidConfig("trials must be >= 1");
  if (repeats < 1) throw InvalidConfig("repeats must be >= 1");
  if (trace_iters < 1) throw InvalidConfig("trace_iters must be >= 1");
  switch (kind) {
    case SweepKind::position_grid:
      if (grid.empty()) throw InvalidConfig("position_grid needs at least one grid point");
      break;
    case SweepKind::m_sweep:
    case SweepKind::runtime_bench:
      if (values.empty()) throw InvalidConfig("sweep needs at least one M value");
      for (double v : values) {
        if (v < 1 || v != std::floor(v)) throw InvalidConfig("M values must be positive integers");
      }
      break;
    case SweepKind::pt_sweep:
      if (values.empty()) throw InvalidConfig("pt_sweep needs at least one P_t value");
      break;
    case SweepKind::convergence_trace:
      break;
  }
}

std::size_t SweepSpec::point_count() const {
  switch (kind) {
    case SweepKind::position_grid: return grid.size();
    case SweepKind::convergence_trace: return 1;
    default: return values.size();
  }
}

std::vector<std::array<double, 2>> position_grid(double side, double step) {
  if (!(step > 0.0)) throw InvalidConfig("grid step must be positive");
  std::vector<double> coords;
  for (int i = 0;; ++i) {
    const double c = 5.0 + step * i;
    if (c > side - 5.0 + 1e-9) break;
    coords.push_back(c);
  }
  std::vector<std::array<double, 2>> grid;
  for (double x : coords) {
    for (double y : coords) grid.push_back({x, y});
  }
  return grid;
}

SweepSpec default_sweep(SweepKind kind, const ScenarioConfig& config, double grid_step) {
  SweepSpec s;
  s.kind = kind;
  s.trials = config.trials;
  s.seed = config.seed;
  switch (kind) {
    case SweepKind::position_grid:
      s.grid = position_grid(config.square_side, grid_step);
      break;
    case SweepKind::m_sweep:
      s.values = {16, 32, 64, 128};
      break;
    case SweepKind::runtime_bench:
      s.values = {16, 32, 64};
      break;
    case SweepKind::pt_sweep:
      s.values = {0, 10, 20, 30};
      break;
    case SweepKind::convergence_trace:
      break;
  }
  return s;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t point, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(trial)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ResultTable run_sweep(const ScenarioConfig& config, const SweepSpec& sweep) {
  config.validate();
  sweep.validate();
  const std::size_t points = sweep.point_count();
  for (std::size_t p = 0; p < points; ++p) {
    std::string label;
    point_config(config, sweep, p, label).validate();
  }
  const std::size_t trials = static_cast<std::size_t>(sweep.trials);
  const std::size_t tasks = points * trials;
  std::vector<std::vector<ResultRow>> slots(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks; t = next++) {
      slots[t] = run_trial(config, sweep, t / trials, static_cast<int>(t % trials));
    }
  };
  unsigned threads = sweep.threads ? sweep.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks)));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }

  ResultTable table;
  table.users = config.users;
  for (auto& slot : slots) {
    for (auto& row : slot) table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace bdris
