#include "bdris/ris_solvers.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "bdris/linalg.hpp"

namespace bdris {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Leakage from the per-user products F_k Q and G_l conj(Q), so that
// F_k Q Q^T G_l^H = fq[k] * gq[l]^H.
double leakage_from_factors(const ChannelSet& ch, const std::vector<Matrix>& fq,
                            const std::vector<Matrix>& gq) {
  const int k_users = ch.users();
  double il = 0.0;
  for (int k = 0; k < k_users; ++k) {
    for (int l = 0; l < k_users; ++l) {
      if (l != k) il += (ch.h_direct[l][k] + fq[k] * gq[l].adjoint()).squaredNorm();
    }
  }
  return il;
}

struct Factors {
  std::vector<Matrix> fq;
  std::vector<Matrix> gq;
};

Factors factors_at(const ChannelSet& ch, const Matrix& q) {
  Factors f;
  const Matrix q_conj = q.conjugate();
  for (int k = 0; k < ch.users(); ++k) {
    f.fq.push_back(ch.f_ris[k] * q);
    f.gq.push_back(ch.g_ris[k] * q_conj);
  }
  return f;
}

Matrix gradient_from_factors(const ChannelSet& ch, const Matrix& q, const Factors& f) {
  const int k_users = ch.users();
  const Index m = q.rows();
  Matrix z = Matrix::Zero(m, m);
  for (int k = 0; k < k_users; ++k) {
    Matrix acc = Matrix::Zero(ch.f_ris[k].rows(), m);
    for (int l = 0; l < k_users; ++l) {
      if (l == k) continue;
      const Matrix e = ch.h_direct[l][k] + f.fq[k] * f.gq[l].adjoint();
      acc += e * ch.g_ris[l];
    }
    z.noalias() += ch.f_ris[k].adjoint() * acc;
  }
  return (z + z.transpose()) * q.conjugate();
}

bool window_converged(const std::vector<double>& il, int window, double rel_tol) {
  const auto n = il.size();
  if (n <= static_cast<std::size_t>(window)) return false;
  const double old = il[n - 1 - static_cast<std::size_t>(window)];
  const double now = il.back();
  return old - now <= rel_tol * std::max(old, 1e-300);
}

ChannelSet block_subproblem(const LinkMatrices& eff, const ChannelSet& ch,
                            const Matrix& theta_block, Index start, Index size) {
  const int k_users = ch.users();
  ChannelSet sub;
  sub.noise_power = ch.noise_power;
  for (int k = 0; k < k_users; ++k) {
    sub.f_ris.push_back(ch.f_ris[k].middleCols(start, size));
    sub.g_ris.push_back(ch.g_ris[k].middleCols(start, size));
  }
  sub.h_direct.assign(static_cast<std::size_t>(k_users),
                      std::vector<Matrix>(static_cast<std::size_t>(k_users)));
  for (int l = 0; l < k_users; ++l) {
    for (int k = 0; k < k_users; ++k) {
      sub.h_direct[l][k] =
          eff[l][k] - sub.f_ris[k] * theta_block * sub.g_ris[l].adjoint();
    }
  }
  return sub;
}

}  // namespace

void OptimizerOptions::validate() const {
  if (max_iters < 1 || window < 1 || max_backtracks < 1 || max_outer < 1 ||
      inner_max_iters < 1 || max_sweeps < 1) {
    throw InvalidConfig("OptimizerOptions: iteration limits must be positive");
  }
  if (!(rel_tol > 0.0) || !(bisect_tol > 0.0) || !(sweep_rel_tol > 0.0) ||
      !(armijo_c > 0.0)) {
    throw InvalidConfig("OptimizerOptions: tolerances must be positive");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw InvalidConfig("OptimizerOptions: backtrack_factor must be in (0, 1)");
  }
}

Matrix mo_gradient(const Matrix& q, const ChannelSet& ch) {
  ch.validate();
  if (q.rows() != ch.elements() || q.cols() != ch.elements()) {
    throw InvalidDimension("mo_gradient: q must be M x M");
  }
  return gradient_from_factors(ch, q, factors_at(ch, q));
}

MoResult minimize_il_mo(const ChannelSet& ch, const Matrix& q0,
                        const OptimizerOptions& options) {
  const auto start = Clock::now();
  ch.validate();
  options.validate();
  const Index m = ch.elements();
  if (q0.rows() != m || q0.cols() != m) {
    throw InvalidDimension("minimize_il_mo: q0 must be M x M");
  }
  if (linalg::unitarity_defect(q0) > kUnitaryTol * std::sqrt(static_cast<double>(m))) {
    throw ContractViolation("minimize_il_mo: q0 is not unitary");
  }
  const int k_users = ch.users();

  MoResult res;
  Matrix q = q0;
  Factors f = factors_at(ch, q);
  double il = leakage_from_factors(ch, f.fq, f.gq);
  res.trace.il_values.push_back(il);

  double mu = options.mu0;
  int full_steps = 0;
  Matrix grad;
  Matrix b;
  for (int it = 0; it < options.max_iters; ++it) {
    res.trace.iterations = it + 1;
    grad = gradient_from_factors(ch, q, f);
    b = 0.5 * (grad.adjoint() * q - q.adjoint() * grad);
    const double b_norm2 = b.squaredNorm();
    if (b_norm2 == 0.0) {
      res.trace.converged = true;
      break;
    }
    if (!(mu > 0.0)) mu = 1.0 / grad.norm();

    // B = W diag(i*lambda) W^H, so exp(mu B) = W diag(e^{i mu lambda}) W^H.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Complex(0.0, -0.5) * (b - b.adjoint()));
    const Matrix& w = eig.eigenvectors();
    const RealVector& lambda = eig.eigenvalues();
    const Matrix w_adj = w.adjoint();
    const Matrix w_tr = w.transpose();
    const Matrix w_conj = w.conjugate();
    std::vector<Matrix> fqw;
    std::vector<Matrix> gqw;
    for (int k = 0; k < k_users; ++k) {
      fqw.push_back(f.fq[k] * w);
      gqw.push_back(f.gq[k] * w_conj);
    }

    bool accepted = false;
    Factors trial;
    trial.fq.resize(static_cast<std::size_t>(k_users));
    trial.gq.resize(static_cast<std::size_t>(k_users));
    Vector phase(m);
    double il_trial = il;
    int tries = 0;
    for (; tries < options.max_backtracks; ++tries) {
      for (Index i = 0; i < m; ++i) phase(i) = std::polar(1.0, mu * lambda(i));
      const Vector phase_conj = phase.conjugate();
      for (int k = 0; k < k_users; ++k) {
        trial.fq[k] = fqw[k] * phase.asDiagonal() * w_adj;
        trial.gq[k] = gqw[k] * phase_conj.asDiagonal() * w_tr;
      }
      il_trial = leakage_from_factors(ch, trial.fq, trial.gq);
      if (il_trial <= il - options.armijo_c * mu * 2.0 * b_norm2) {
        accepted = true;
        break;
      }
      mu *= options.backtrack_factor;
    }
    if (!accepted) {
      // No admissible step: the iterate is stationary to working precision.
      res.trace.converged = true;
      break;
    }
    q = (q * w) * phase.asDiagonal() * w_adj;
    f = factors_at(ch, q);
    il = leakage_from_factors(ch, f.fq, f.gq);
    res.trace.il_values.push_back(il);

    if (tries == 0) {
      if (++full_steps >= 2) {
        mu *= 2.0;
        full_steps = 0;
      }
    } else {
      full_steps = 0;
    }
    if (window_converged(res.trace.il_values, options.window, options.rel_tol)) {
      res.trace.converged = true;
      break;
    }
  }

  f = factors_at(ch, q);
  grad = gradient_from_factors(ch, q, f);
  b = 0.5 * (grad.adjoint() * q - q.adjoint() * grad);
  res.euclidean_grad_norm = grad.norm();
  res.riemannian_grad_norm = (q * b).norm();
  res.stationary = res.riemannian_grad_norm <= 1e-4 * (1.0 + res.euclidean_grad_norm);

  Matrix theta = q * q.transpose();
  theta = 0.5 * (theta + theta.transpose());
  res.q = std::move(q);
  res.theta = ScatteringMatrix{std::move(theta), Architecture::fully, 0};
  res.trace.wall_ms = elapsed_ms(start);
  return res;
}

MoResult minimize_il_mo(const ChannelSet& ch, const OptimizerOptions& options) {
  return minimize_il_mo(ch, linalg::random_unitary(ch.elements(), options.seed), options);
}

RelaxedSolution solve_relaxed_il(const ChannelSet& ch, Parametrization parametrization,
                                 std::optional<double> power_cap, double bisect_tol) {
  const StackedLeakageModel model = stacked_leakage_model(ch, parametrization);
  const Index m = ch.elements();
  const Index n = model.map.cols();

  // x(lambda) = -(A^H A + lambda I)^{-1} A^H b through the thin SVD of A.
  Eigen::BDCSVD<Matrix> svd(model.map, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double rank_tol = smax * 1e-13 * static_cast<double>(std::max(model.map.rows(), n));
  const Vector proj = svd.matrixU().adjoint() * model.offset;

  auto coefficients = [&](double lambda) {
    Vector c = Vector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) <= rank_tol) continue;
      c(i) = -proj(i) * (sv(i) / (sv(i) * sv(i) + lambda));
    }
    return c;
  };
  auto norm_sq = [&](double lambda) { return coefficients(lambda).squaredNorm(); };

  RelaxedSolution sol;
  double lambda = 0.0;
  if (power_cap && norm_sq(0.0) > *power_cap) {
    const double cap = *power_cap;
    const double atb = (model.map.adjoint() * model.offset).norm();
    double hi = std::max(atb / std::sqrt(std::max(cap, 1e-300)), 1e-300);
    int guard = 0;
    while (norm_sq(hi) > cap) {
      hi *= 2.0;
      if (++guard > 2000 || !std::isfinite(hi)) {
        throw NumericalFailure("solve_relaxed_il: failed to bracket lambda (hi=" +
                               std::to_string(hi) + ")");
      }
    }
    double lo = 0.0;
    int steps = 0;
    while (true) {
      const double mid = 0.5 * (lo + hi);
      const double val = norm_sq(mid);
      ++steps;
      if (std::abs(val - cap) <= bisect_tol * cap) {
        lambda = mid;
        break;
      }
      if (val > cap) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (steps > 4000 || hi - lo <= 1e-17 * hi) {
        lambda = hi;  // feasible end of the bracket
        break;
      }
    }
    sol.bisection_steps = steps;
  }
  sol.lambda = lambda;
  sol.x = svd.matrixV() * coefficients(lambda);

  switch (parametrization) {
    case Parametrization::full:
      sol.theta = linalg::unvec(sol.x, m);
      break;
    case Parametrization::symmetric: {
      sol.theta = Matrix::Zero(m, m);
      const auto pairs = linalg::symmetric_index_pairs(m);
      const double w = 1.0 / std::numbers::sqrt2;
      for (std::size_t c = 0; c < pairs.size(); ++c) {
        const auto [i, j] = pairs[c];
        const Complex v = sol.x(static_cast<Index>(c));
        if (i == j) {
          sol.theta(i, i) = v;
        } else {
          sol.theta(i, j) = w * v;
          sol.theta(j, i) = w * v;
        }
      }
      break;
    }
    case Parametrization::diagonal:
      sol.theta = sol.x.asDiagonal();
      break;
  }
  sol.il = (model.offset + model.map * sol.x).squaredNorm();
  return sol;
}

RtpResult minimize_il_rtp(const ChannelSet& ch, const OptimizerOptions& options) {
  options.validate();
  RtpResult res;
  res.relaxed = solve_relaxed_il(ch, Parametrization::symmetric,
                                 static_cast<double>(ch.elements()), options.bisect_tol);
  Matrix theta = linalg::project_to_unitary(res.relaxed.theta);
  theta = 0.5 * (theta + theta.transpose());
  res.projected_il = interference_leakage(ch, theta);
  res.theta = ScatteringMatrix{std::move(theta), Architecture::fully, 0};
  return res;
}

GroupResult minimize_il_group(const ChannelSet& ch, Index group_size,
                              InnerSolver inner, const OptimizerOptions& options) {
  const auto start = Clock::now();
  ch.validate();
  options.validate();
  const Index m = ch.elements();
  if (group_size < 1 || m % group_size != 0) {
    throw InvalidConfig("minimize_il_group: group size " + std::to_string(group_size) +
                        " does not divide M = " + std::to_string(m));
  }
  const Index groups = m / group_size;
  const int k_users = ch.users();

  Matrix theta = Matrix::Identity(m, m);
  std::vector<Matrix> q_blocks(static_cast<std::size_t>(groups),
                               Matrix::Identity(group_size, group_size));
  LinkMatrices eff = effective_channels(ch, theta);
  auto total_il = [&]() {
    double il = 0.0;
    for (int k = 0; k < k_users; ++k) {
      for (int l = 0; l < k_users; ++l) {
        if (l != k) il += eff[l][k].squaredNorm();
      }
    }
    return il;
  };

  OptimizerOptions inner_opts = options;
  inner_opts.max_iters = options.inner_max_iters;

  GroupResult res;
  double il = total_il();
  res.trace.il_values.push_back(il);
  for (int sweep = 0; sweep < options.max_outer; ++sweep) {
    res.trace.iterations = sweep + 1;
    for (Index g = 0; g < groups; ++g) {
      const Index off = g * group_size;
      const Matrix old_block = theta.block(off, off, group_size, group_size);
      const ChannelSet sub = block_subproblem(eff, ch, old_block, off, group_size);
      Matrix new_block;
      if (inner == InnerSolver::mo) {
        MoResult mo = minimize_il_mo(sub, q_blocks[static_cast<std::size_t>(g)], inner_opts);
        q_blocks[static_cast<std::size_t>(g)] = mo.q;
        new_block = mo.theta.theta;
      } else {
        RtpResult rtp = minimize_il_rtp(sub, inner_opts);
        if (rtp.projected_il <= interference_leakage(sub, old_block)) {
          new_block = rtp.theta.theta;
        } else {
          new_block = old_block;
        }
      }
      const Matrix delta = new_block - old_block;
      theta.block(off, off, group_size, group_size) = new_block;
      for (int k = 0; k < k_users; ++k) {
        const Matrix fd = sub.f_ris[k] * delta;
        for (int l = 0; l < k_users; ++l) eff[l][k] += fd * sub.g_ris[l].adjoint();
      }
    }
    eff = effective_channels(ch, theta);
    const double next = total_il();
    res.trace.il_values.push_back(next);
    const double change = il - next;
    il = next;
    if (change <= options.rel_tol * res.trace.il_values[res.trace.il_values.size() - 2]) {
      res.trace.converged = true;
      break;
    }
  }
  res.theta = ScatteringMatrix{std::move(theta), Architecture::group, group_size};
  res.trace.wall_ms = elapsed_ms(start);
  return res;
}

DiagResult minimize_il_diag(const ChannelSet& ch, const OptimizerOptions& options,
                            bool record_coordinates) {
  const auto start = Clock::now();
  options.validate();
  const IlQuadraticForm form = il_quadratic_form(ch, QuadraticMode::diagonal);
  const Index m = ch.elements();
  const Matrix& sigma = form.sigma_big;

  Vector r = Vector::Ones(m);
  Vector y = sigma * r;  // running Sigma * r
  DiagResult res;
  double il = form.evaluate(r);
  res.trace.il_values.push_back(il);
  if (record_coordinates) res.coordinate_il.push_back(il);

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    res.trace.iterations = sweep + 1;
    for (Index i = 0; i < m; ++i) {
      // IL(r_i) = const + 2 Re(conj(r_i) c), c = s_i + sum_{j != i} Sigma_ij r_j.
      const Complex c = form.s_vec(i) + y(i) - sigma(i, i) * r(i);
      const double mag = std::abs(c);
      if (mag == 0.0) {
        if (record_coordinates) res.coordinate_il.push_back(il);
        continue;
      }
      const Complex next = -c / mag;
      const double gain = 2.0 * (std::conj(next) * c).real() - 2.0 * (std::conj(r(i)) * c).real();
      if (gain < 0.0) {
        y += sigma.col(i) * (next - r(i));
        r(i) = next;
        il += gain;
      }
      if (record_coordinates) res.coordinate_il.push_back(form.evaluate(r));
    }
    y = sigma * r;
    const double next_il = form.evaluate(r);
    const double prev = res.trace.il_values.back();
    res.trace.il_values.push_back(next_il);
    il = next_il;
    if (prev - next_il <= options.sweep_rel_tol * prev) {
      res.trace.converged = true;
      break;
    }
  }
  res.theta = ScatteringMatrix{Matrix(r.asDiagonal()), Architecture::diagonal, 0};
  res.trace.wall_ms = elapsed_ms(start);
  return res;
}

}  // namespace bdris
