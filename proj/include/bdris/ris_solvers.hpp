#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/leakage.hpp"
#include "bdris/scattering.hpp"
#include "bdris/types.hpp"

namespace bdris {

struct OptimizerOptions {
  int max_iters = 2000;         // MO iterations
  double rel_tol = 1e-6;        // relative IL change over `window` iterations
  int window = 10;
  double mu0 = 0.0;             // initial step; <= 0 means 1/||grad||_F
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  int max_backtracks = 60;
  double bisect_tol = 1e-8;
  std::uint64_t seed = 1;
  int max_outer = 20;           // group-connected sweeps
  int inner_max_iters = 200;    // MO budget per group block update
  int max_sweeps = 200;         // diagonal BCD sweeps
  double sweep_rel_tol = 1e-9;

  void validate() const;
};

struct IterTrace {
  std::vector<double> il_values;  // initial value, then one per accepted step
  double wall_ms = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Wirtinger gradient of J(Q) = IL(Q Q^T) with respect to conj(Q):
/// (Z + Z^T) conj(Q), Z = sum_{l != k} F_k^H (H_lk + F_k Q Q^T G_l^H) G_l.
Matrix mo_gradient(const Matrix& q, const ChannelSet& ch);

struct MoResult {
  ScatteringMatrix theta;  // fully-connected, theta = q q^T
  Matrix q;
  IterTrace trace;
  double riemannian_grad_norm = 0.0;  // ||Q B_skew||_F at termination
  double euclidean_grad_norm = 0.0;
  bool stationary = false;            // riemannian <= 1e-4 (1 + euclidean)
};

/// Geodesic descent on U(M) with Armijo backtracking; Q <- Q exp(mu B_skew).
MoResult minimize_il_mo(const ChannelSet& ch, const Matrix& q0,
                        const OptimizerOptions& options);
/// Same, initialized from random_unitary(M, options.seed).
MoResult minimize_il_mo(const ChannelSet& ch, const OptimizerOptions& options);

/// Closed-form solution of min IL over a linear parametrization of theta,
/// optionally with the trace cap ||x||^2 <= power_cap.
struct RelaxedSolution {
  Vector x;           // unknowns in the parametrization
  Matrix theta;       // M x M
  double lambda = 0.0;
  double il = 0.0;    // leakage at theta (no projection)
  int bisection_steps = 0;
};

RelaxedSolution solve_relaxed_il(const ChannelSet& ch, Parametrization parametrization,
                                 std::optional<double> power_cap, double bisect_tol);

struct RtpResult {
  ScatteringMatrix theta;  // fully-connected, projected
  RelaxedSolution relaxed;
  double projected_il = 0.0;
};

/// Relax-then-project: symmetric trace-capped least squares, then Q Q^T.
RtpResult minimize_il_rtp(const ChannelSet& ch, const OptimizerOptions& options);

enum class InnerSolver { mo, rtp };

struct GroupResult {
  ScatteringMatrix theta;
  IterTrace trace;  // one value per outer sweep
};

/// Block-coordinate sweeps over the G = M / m_g groups, starting from I.
GroupResult minimize_il_group(const ChannelSet& ch, Index group_size,
                              InnerSolver inner, const OptimizerOptions& options);

struct DiagResult {
  ScatteringMatrix theta;
  IterTrace trace;                  // one value per sweep
  std::vector<double> coordinate_il;  // after every single-coordinate update
};

/// Cyclic unit-modulus coordinate descent from r = 1.
DiagResult minimize_il_diag(const ChannelSet& ch, const OptimizerOptions& options,
                            bool record_coordinates = false);

}  // namespace bdris
