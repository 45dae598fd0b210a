#include "bdris/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "bdris/linalg.hpp"

namespace bdris {

namespace {

int user_count(const LinkMatrices& eff) {
  const auto k = eff.size();
  for (const auto& row : eff) {
    if (row.size() != k) throw InvalidDimension("link matrices must be K x K");
  }
  return static_cast<int>(k);
}

// sigma2 I + sum_l H_lk V_l V_l^H H_lk^H, optionally skipping l == k.
Matrix receive_covariance(const LinkMatrices& eff, const std::vector<Matrix>& v,
                          double sigma2, int k, bool include_own) {
  const int k_users = user_count(eff);
  const Index nr = eff[0][static_cast<std::size_t>(k)].rows();
  Matrix cov = sigma2 * Matrix::Identity(nr, nr);
  for (int l = 0; l < k_users; ++l) {
    if (l == k && !include_own) continue;
    const Matrix hv = eff[l][k] * v[l];
    cov.noalias() += hv * hv.adjoint();
  }
  return cov;
}

double log_det_hpd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(0.5 * (a + a.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("log_det: matrix is not positive definite");
  }
  const auto diag = llt.matrixLLT().diagonal();
  double acc = 0.0;
  for (Index i = 0; i < diag.size(); ++i) acc += std::log(diag(i).real());
  return 2.0 * acc;
}

Matrix hpd_inverse(const Matrix& a) {
  const Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    return llt.solve(Matrix::Identity(a.rows(), a.cols()));
  }
  const double n = static_cast<double>(a.rows());
  const double eps = std::max(1e-12 * sym.trace().real() / n, 1e-300);
  const Matrix reg = sym + eps * Matrix::Identity(a.rows(), a.cols());
  return reg.ldlt().solve(Matrix::Identity(a.rows(), a.cols()));
}

// Solve B x = h, regularizing B by eps = 1e-12 tr(B)/N when it is singular.
Vector regularized_solve(const Matrix& b, const Vector& h) {
  const Matrix sym = 0.5 * (b + b.adjoint());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt.solve(h);
  const double n = static_cast<double>(b.rows());
  const double eps = std::max(1e-12 * sym.trace().real() / n, 1e-300);
  const Matrix reg = sym + eps * Matrix::Identity(b.rows(), b.cols());
  return reg.ldlt().solve(h);
}

Matrix orthonormal_basis(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

std::vector<Matrix> dominant_directions(const LinkMatrices& eff, Index d) {
  std::vector<Matrix> v;
  for (std::size_t k = 0; k < eff.size(); ++k) {
    const Matrix& h = eff[k][k];
    Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullV);
    v.push_back(svd.matrixV().leftCols(d));
  }
  return v;
}

void require_streams(const LinkMatrices& eff, Index d) {
  for (std::size_t k = 0; k < eff.size(); ++k) {
    const Matrix& h = eff[k][k];
    if (d < 1 || d > std::min(h.rows(), h.cols())) {
      throw InvalidDimension("stream count d must be in [1, min(N_T, N_R)]");
    }
  }
}

double relative_change(double prev, double cur) {
  return std::abs(prev - cur) / std::max(std::abs(prev), 1e-300);
}

}  // namespace

PowerAllocation waterfill(const RealVector& gains, double total_power, double noise) {
  if (total_power < 0.0 || noise < 0.0) {
    throw ContractViolation("waterfill: power and noise must be non-negative");
  }
  const Index n = gains.size();
  PowerAllocation out;
  out.powers = RealVector::Zero(n);
  std::vector<Index> order;
  for (Index i = 0; i < n; ++i) {
    if (gains(i) > 0.0) order.push_back(i);
  }
  if (order.empty() || total_power == 0.0) return out;
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return gains(a) > gains(b); });
  std::vector<double> inv(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inv[i] = noise / gains(order[i]);

  double level = 0.0;
  for (std::size_t active = order.size(); active >= 1; --active) {
    const double sum_inv = std::accumulate(inv.begin(), inv.begin() + static_cast<long>(active), 0.0);
    level = (total_power + sum_inv) / static_cast<double>(active);
    if (level > inv[active - 1] || active == 1) break;
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.powers(order[i]) = std::max(0.0, level - inv[i]);
  }
  out.water_level = level;
  return out;
}

PrecoderReport svd_precoders(const LinkMatrices& eff, double p_t, double sigma2,
                             Index max_streams) {
  const int k_users = user_count(eff);
  PrecoderReport rep;
  for (int k = 0; k < k_users; ++k) {
    const Matrix& h = eff[k][k];
    Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Index modes = std::min(h.rows(), h.cols());
    const Index streams = max_streams > 0 ? std::min(max_streams, modes) : modes;
    const RealVector gains = svd.singularValues().head(streams).array().square();
    const PowerAllocation pa = waterfill(gains, p_t, sigma2);
    if (pa.powers.sum() == 0.0) {
      rep.warnings.push_back("user " + std::to_string(k) +
                             ": zero direct channel, precoder left at zero");
    }
    const RealVector amp = pa.powers.cwiseSqrt();
    rep.beamformers.v.push_back(svd.matrixV().leftCols(streams) * amp.asDiagonal());
    rep.beamformers.u.push_back(svd.matrixU().leftCols(streams));
  }
  rep.objective.push_back(sum_rate(eff, rep.beamformers, sigma2));
  return rep;
}

void update_min_il_decoders(const LinkMatrices& eff, Beamformers& bf, Index d) {
  const int k_users = user_count(eff);
  bf.u.resize(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    const Index nr = eff[0][k].rows();
    Matrix cov = Matrix::Zero(nr, nr);
    for (int l = 0; l < k_users; ++l) {
      if (l == k) continue;
      const Matrix hv = eff[l][k] * bf.v[l];
      cov.noalias() += hv * hv.adjoint();
    }
    bf.u[k] = linalg::smallest_eigenvectors(cov, d);
  }
}

void update_min_il_precoders(const LinkMatrices& eff, Beamformers& bf, Index d,
                             double p_t) {
  const int k_users = user_count(eff);
  const double scale = std::sqrt(p_t / static_cast<double>(d));
  bf.v.resize(static_cast<std::size_t>(k_users));
  for (int l = 0; l < k_users; ++l) {
    const Index nt = eff[l][0].cols();
    Matrix cov = Matrix::Zero(nt, nt);
    for (int k = 0; k < k_users; ++k) {
      if (k == l) continue;
      const Matrix hu = eff[l][k].adjoint() * bf.u[k];
      cov.noalias() += hu * hu.adjoint();
    }
    bf.v[l] = scale * linalg::smallest_eigenvectors(cov, d);
  }
}

PrecoderReport min_il_beamformers(const LinkMatrices& eff, Index d, double p_t,
                                  int iters, double rel_tol) {
  require_streams(eff, d);
  const double scale = std::sqrt(p_t / static_cast<double>(d));
  PrecoderReport rep;
  Beamformers& bf = rep.beamformers;
  bf.v = dominant_directions(eff, d);
  for (auto& v : bf.v) v *= scale;

  update_min_il_decoders(eff, bf, d);
  rep.objective.push_back(il_with_beamformers(eff, bf));
  for (int it = 0; it < iters; ++it) {
    rep.iterations = it + 1;
    const double before = rep.objective.back();
    update_min_il_precoders(eff, bf, d, p_t);
    rep.objective.push_back(il_with_beamformers(eff, bf));
    update_min_il_decoders(eff, bf, d);
    rep.objective.push_back(il_with_beamformers(eff, bf));
    const double after = rep.objective.back();
    if (after == 0.0 || before - after <= rel_tol * before) break;
  }
  return rep;
}

PrecoderReport max_sinr_beamformers(const LinkMatrices& eff, Index d, double p_t,
                                    double sigma2, int iters, double rel_tol) {
  const int k_users = user_count(eff);
  require_streams(eff, d);
  const double stream_power = p_t / static_cast<double>(d);
  const double scale = std::sqrt(stream_power);
  PrecoderReport rep;
  std::vector<Matrix> v_dir = dominant_directions(eff, d);  // unit-norm columns
  std::vector<Matrix> u_dir(static_cast<std::size_t>(k_users));

  auto precoders = [&]() {
    std::vector<Matrix> v;
    for (const auto& dir : v_dir) v.push_back(scale * dir);
    return v;
  };

  for (int it = 0; it < iters; ++it) {
    rep.iterations = it + 1;
    const std::vector<Matrix> v = precoders();
    for (int k = 0; k < k_users; ++k) {
      const Matrix cov = receive_covariance(eff, v, sigma2, k, true);
      Matrix u(cov.rows(), d);
      for (Index j = 0; j < d; ++j) {
        const Vector h = eff[k][k] * v[k].col(j);
        const Vector w = regularized_solve(cov - h * h.adjoint(), h);
        const double nrm = w.norm();
        u.col(j) = nrm > 0.0 ? Vector(w / nrm) : Vector(Vector::Unit(cov.rows(), j));
      }
      u_dir[k] = std::move(u);
    }
    // Reciprocal network: Rx k transmits along u_dir[k] through H_lk^H.
    for (int l = 0; l < k_users; ++l) {
      const Index nt = eff[l][0].cols();
      Matrix cov = sigma2 * Matrix::Identity(nt, nt);
      for (int k = 0; k < k_users; ++k) {
        const Matrix hu = scale * (eff[l][k].adjoint() * u_dir[k]);
        cov.noalias() += hu * hu.adjoint();
      }
      Matrix vd(nt, d);
      for (Index j = 0; j < d; ++j) {
        const Vector h = scale * (eff[l][l].adjoint() * u_dir[l].col(j));
        const Vector w = regularized_solve(cov - h * h.adjoint(), h);
        const double nrm = w.norm();
        vd.col(j) = nrm > 0.0 ? Vector(w / nrm) : Vector(Vector::Unit(nt, j));
      }
      v_dir[l] = std::move(vd);
    }
    Beamformers probe{precoders(), {}};
    rep.objective.push_back(sum_rate(eff, probe, sigma2));
    const auto n = rep.objective.size();
    if (n >= 2 && relative_change(rep.objective[n - 2], rep.objective[n - 1]) <= rel_tol) break;
  }
  rep.beamformers.v = precoders();
  if (rep.objective.empty()) {
    rep.objective.push_back(sum_rate(eff, rep.beamformers, sigma2));
  }
  // Decoders: orthonormal basis of the per-stream receive filters.
  for (int k = 0; k < k_users; ++k) {
    if (u_dir[k].size() == 0) {
      const Matrix cov = receive_covariance(eff, rep.beamformers.v, sigma2, k, true);
      u_dir[k] = hpd_inverse(cov) * eff[k][k] * rep.beamformers.v[k];
    }
    rep.beamformers.u.push_back(orthonormal_basis(u_dir[k]));
  }
  return rep;
}

double rate_of_user(const LinkMatrices& eff, const Beamformers& bf, double sigma2, int k) {
  const Matrix full = receive_covariance(eff, bf.v, sigma2, k, true);
  const Matrix interf = receive_covariance(eff, bf.v, sigma2, k, false);
  const double nats = log_det_hpd(full) - log_det_hpd(interf);
  return std::max(0.0, nats / std::numbers::ln2);
}

double rate_of_user_eigen(const LinkMatrices& eff, const Beamformers& bf,
                          double sigma2, int k) {
  const Matrix interf = receive_covariance(eff, bf.v, sigma2, k, false);
  const Matrix hv = eff[k][k] * bf.v[k];
  const Matrix signal = hv * hv.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> ei(0.5 * (interf + interf.adjoint()));
  const RealVector inv_sqrt = ei.eigenvalues().array().rsqrt();
  const Matrix w = ei.eigenvectors() * inv_sqrt.asDiagonal() * ei.eigenvectors().adjoint();
  const Matrix whitened = w * signal * w;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (whitened + whitened.adjoint()),
                                           Eigen::EigenvaluesOnly);
  double bits = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    bits += std::log2(1.0 + std::max(0.0, es.eigenvalues()(i)));
  }
  return bits;
}

std::vector<double> user_rates(const LinkMatrices& eff, const Beamformers& bf,
                               double sigma2) {
  const int k_users = user_count(eff);
  std::vector<double> rates;
  for (int k = 0; k < k_users; ++k) rates.push_back(rate_of_user(eff, bf, sigma2, k));
  return rates;
}

double sum_rate(const LinkMatrices& eff, const Beamformers& bf, double sigma2) {
  const auto rates = user_rates(eff, bf, sigma2);
  return std::accumulate(rates.begin(), rates.end(), 0.0);
}

SurrogateCoefficients surrogate_coefficients(const LinkMatrices& eff,
                                             const std::vector<Matrix>& v_bar,
                                             double sigma2) {
  const int k_users = user_count(eff);
  if (static_cast<int>(v_bar.size()) != k_users) {
    throw InvalidDimension("surrogate_coefficients: precoder count mismatch");
  }
  if (!(sigma2 > 0.0)) throw ContractViolation("surrogate_coefficients: sigma2 must be > 0");
  SurrogateCoefficients sc;
  sc.a_mat.assign(static_cast<std::size_t>(k_users),
                  std::vector<Matrix>(static_cast<std::size_t>(k_users)));
  for (int k = 0; k < k_users; ++k) {
    const Matrix interf = receive_covariance(eff, v_bar, sigma2, k, false);
    const Matrix full = receive_covariance(eff, v_bar, sigma2, k, true);
    const Matrix r = hpd_inverse(interf);
    const Matrix lam = eff[k][k] * v_bar[k];
    const Matrix r_lam = r * lam;
    const double tr_term = (lam.adjoint() * r_lam).trace().real();
    sc.a.push_back(log_det_hpd(full) - log_det_hpd(interf) - tr_term);
    Matrix b = r - hpd_inverse(full);
    sc.b_mat.push_back(0.5 * (b + b.adjoint()));
    sc.r_mat.push_back(r);
    for (int l = 0; l < k_users; ++l) {
      sc.a_mat[l][k] = l == k ? r_lam : Matrix::Zero(lam.rows(), v_bar[l].cols());
    }
  }
  return sc;
}

double surrogate_rate(const SurrogateCoefficients& sc, const LinkMatrices& eff,
                      const std::vector<Matrix>& v, double sigma2, int k) {
  const int k_users = user_count(eff);
  double val = sc.a[k];
  for (int l = 0; l < k_users; ++l) {
    val += 2.0 * (sc.a_mat[l][k] * v[l].adjoint() * eff[l][k].adjoint()).trace().real();
  }
  const Matrix full = receive_covariance(eff, v, sigma2, k, true);
  val -= (sc.b_mat[k] * full).trace().real();
  return val;
}

PrecoderReport max_sr_beamformers(const LinkMatrices& eff,
                                  const std::vector<Matrix>& v_init, double p_t,
                                  double sigma2, int mm_iters, double rel_tol) {
  const int k_users = user_count(eff);
  if (static_cast<int>(v_init.size()) != k_users) {
    throw InvalidDimension("max_sr_beamformers: precoder count mismatch");
  }
  for (const auto& v : v_init) {
    if (transmit_power(v) > p_t * (1.0 + 1e-9)) {
      throw ContractViolation("max_sr_beamformers: initial precoder exceeds power budget");
    }
  }
  PrecoderReport rep;
  std::vector<Matrix> v = v_init;
  auto current_rate = [&]() { return sum_rate(eff, Beamformers{v, {}}, sigma2); };
  rep.objective.push_back(current_rate());

  for (int it = 0; it < mm_iters; ++it) {
    rep.iterations = it + 1;
    const SurrogateCoefficients sc = surrogate_coefficients(eff, v, sigma2);
    std::vector<Matrix> next(v.size());
    for (int l = 0; l < k_users; ++l) {
      const Index nt = eff[l][0].cols();
      Matrix dmat = Matrix::Zero(nt, nt);
      Matrix cmat = Matrix::Zero(nt, v[l].cols());
      for (int k = 0; k < k_users; ++k) {
        dmat.noalias() += eff[l][k].adjoint() * sc.b_mat[k] * eff[l][k];
        cmat.noalias() += eff[l][k].adjoint() * sc.a_mat[l][k];
      }
      // argmax 2 Re tr(V^H C) - tr(V^H D V)  s.t.  ||V||_F^2 <= p_t
      Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (dmat + dmat.adjoint()));
      const RealVector delta = eig.eigenvalues().cwiseMax(0.0);
      const Matrix ct = eig.eigenvectors().adjoint() * cmat;
      const RealVector row_energy = ct.rowwise().squaredNorm();
      const double scale = std::max(delta.maxCoeff(), 1e-300);
      const double total = row_energy.sum();
      auto norm_sq = [&](double mu) {
        double acc = 0.0;
        for (Index i = 0; i < delta.size(); ++i) {
          const double den = delta(i) + mu;
          if (den <= 1e-14 * scale) {
            if (row_energy(i) > 1e-28 * std::max(total, 1e-300)) {
              return std::numeric_limits<double>::infinity();
            }
            continue;
          }
          acc += row_energy(i) / (den * den);
        }
        return acc;
      };
      double mu = 0.0;
      if (norm_sq(0.0) > p_t) {
        double lo = 0.0;
        double hi = std::sqrt(total / p_t);
        if (!(hi > 0.0) || !std::isfinite(hi)) {
          throw NumericalFailure("max_sr_beamformers: invalid multiplier bracket");
        }
        for (int step = 0; step < 300; ++step) {
          const double mid = 0.5 * (lo + hi);
          const double val = norm_sq(mid);
          if (std::abs(val - p_t) <= 1e-13 * p_t) {
            hi = mid;
            break;
          }
          (val > p_t ? lo : hi) = mid;
        }
        mu = hi;
        if (norm_sq(mu) > p_t * (1.0 + 1e-9)) {
          throw NumericalFailure("max_sr_beamformers: power bisection failed");
        }
      }
      Matrix scaled = ct;
      for (Index i = 0; i < delta.size(); ++i) {
        const double den = delta(i) + mu;
        if (den <= 1e-14 * scale) {
          scaled.row(i).setZero();
        } else {
          scaled.row(i) /= den;
        }
      }
      next[l] = eig.eigenvectors() * scaled;
      const double pw = transmit_power(next[l]);
      if (pw > p_t) next[l] *= std::sqrt(p_t / pw);
    }
    v = std::move(next);
    rep.objective.push_back(current_rate());
    const auto n = rep.objective.size();
    if (relative_change(rep.objective[n - 2], rep.objective[n - 1]) <= rel_tol) break;
  }
  rep.beamformers.v = v;
  rep.beamformers.u = mmse_decoders(eff, v, sigma2);
  return rep;
}

std::vector<Matrix> mmse_decoders(const LinkMatrices& eff, const std::vector<Matrix>& v,
                                  double sigma2) {
  const int k_users = user_count(eff);
  std::vector<Matrix> u;
  for (int k = 0; k < k_users; ++k) {
    const Matrix cov = receive_covariance(eff, v, sigma2, k, true);
    const Matrix filt = hpd_inverse(cov) * eff[k][k] * v[k];
    u.push_back(orthonormal_basis(filt));
  }
  return u;
}

}  // namespace bdris
