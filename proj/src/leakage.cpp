#include "bdris/leakage.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bdris/linalg.hpp"

namespace bdris {

namespace {

void require_theta(const ChannelSet& ch, const Matrix& theta) {
  const Index m = ch.elements();
  if (theta.rows() != m || theta.cols() != m) {
    throw InvalidDimension("theta must be " + std::to_string(m) + "x" +
                           std::to_string(m) + ", got " +
                           std::to_string(theta.rows()) + "x" +
                           std::to_string(theta.cols()));
  }
}

void require_beamformers(const ChannelSet& ch, const Beamformers& bf) {
  const auto k = static_cast<std::size_t>(ch.users());
  if (bf.v.size() != k || bf.u.size() != k) {
    throw InvalidDimension("beamformers: user count mismatch");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (bf.v[i].rows() != ch.g_ris[i].rows() || bf.u[i].rows() != ch.f_ris[i].rows()) {
      throw InvalidDimension("beamformers: antenna count mismatch for user " +
                             std::to_string(i));
    }
  }
}

}  // namespace

double IlQuadraticForm::evaluate(const Vector& r) const {
  if (r.size() != s_vec.size()) throw InvalidDimension("IlQuadraticForm: bad r length");
  const double quad = r.dot(sigma_big * r).real();
  const double lin = r.dot(s_vec).real();
  return t_trace + quad + 2.0 * lin;
}

double interference_leakage(const ChannelSet& ch, const Matrix& theta) {
  ch.validate();
  require_theta(ch, theta);
  const int k_users = ch.users();
  double il = 0.0;
  for (int k = 0; k < k_users; ++k) {
    const Matrix f_theta = ch.f_ris[k] * theta;
    for (int l = 0; l < k_users; ++l) {
      if (l == k) continue;
      il += (ch.h_direct[l][k] + f_theta * ch.g_ris[l].adjoint()).squaredNorm();
    }
  }
  return il;
}

double interference_leakage(const ChannelSet& ch, const ScatteringMatrix& s) {
  return interference_leakage(ch, s.theta);
}

double direct_leakage(const ChannelSet& ch) {
  double t = 0.0;
  for (int l = 0; l < ch.users(); ++l) {
    for (int k = 0; k < ch.users(); ++k) {
      if (l != k) t += ch.h_direct[l][k].squaredNorm();
    }
  }
  return t;
}

IlQuadraticForm il_quadratic_form(const ChannelSet& ch, QuadraticMode mode) {
  ch.validate();
  const int k_users = ch.users();
  const Index m = ch.elements();
  IlQuadraticForm form;
  form.mode = mode;
  const Index dim = mode == QuadraticMode::bdris ? m * m : m;
  form.sigma_big = Matrix::Zero(dim, dim);
  Matrix s_mat = Matrix::Zero(m, m);
  for (int k = 0; k < k_users; ++k) {
    const Matrix ff = ch.f_ris[k].adjoint() * ch.f_ris[k];
    for (int l = 0; l < k_users; ++l) {
      if (l == k) continue;
      const Matrix gg = ch.g_ris[l].transpose() * ch.g_ris[l].conjugate();
      if (mode == QuadraticMode::bdris) {
        // Kronecker product gg (x) ff, block (a, b) = gg(a, b) * ff.
        for (Index b = 0; b < m; ++b) {
          for (Index a = 0; a < m; ++a) {
            form.sigma_big.block(a * m, b * m, m, m) += gg(a, b) * ff;
          }
        }
      } else {
        form.sigma_big += gg.cwiseProduct(ff);
      }
      s_mat += ch.f_ris[k].adjoint() * ch.h_direct[l][k] * ch.g_ris[l];
    }
  }
  form.s_vec = mode == QuadraticMode::bdris ? linalg::vec(s_mat)
                                            : Vector(s_mat.diagonal());
  form.t_trace = direct_leakage(ch);
  return form;
}

StackedLeakageModel stacked_leakage_model(const ChannelSet& ch,
                                          Parametrization parametrization) {
  ch.validate();
  const int k_users = ch.users();
  const Index m = ch.elements();
  Index rows = 0;
  for (int k = 0; k < k_users; ++k) {
    for (int l = 0; l < k_users; ++l) {
      if (l != k) rows += ch.h_direct[l][k].size();
    }
  }
  const auto pairs = linalg::symmetric_index_pairs(m);
  Index cols = 0;
  switch (parametrization) {
    case Parametrization::full: cols = m * m; break;
    case Parametrization::symmetric: cols = static_cast<Index>(pairs.size()); break;
    case Parametrization::diagonal: cols = m; break;
  }

  StackedLeakageModel model;
  model.parametrization = parametrization;
  model.map.resize(rows, cols);
  model.offset.resize(rows);
  const double w = 1.0 / std::numbers::sqrt2;

  Index row = 0;
  for (int k = 0; k < k_users; ++k) {
    const Matrix& f = ch.f_ris[k];
    for (int l = 0; l < k_users; ++l) {
      if (l == k) continue;
      const Matrix& h = ch.h_direct[l][k];
      const Matrix g_conj = ch.g_ris[l].conjugate();
      const Index nr = h.rows();
      const Index nt = h.cols();
      const Index n = h.size();
      model.offset.segment(row, n) = linalg::vec(h);
      // vec(f_i g_j^H): entry (b, a) = F(b, i) * conj(G(a, j)).
      auto unit_column = [&](Index i, Index j) {
        Vector c(n);
        for (Index a = 0; a < nt; ++a) c.segment(a * nr, nr) = f.col(i) * g_conj(a, j);
        return c;
      };
      switch (parametrization) {
        case Parametrization::full:
          for (Index j = 0; j < m; ++j) {
            for (Index i = 0; i < m; ++i) {
              model.map.block(row, i + j * m, n, 1) = unit_column(i, j);
            }
          }
          break;
        case Parametrization::symmetric:
          for (Index c = 0; c < cols; ++c) {
            const auto [i, j] = pairs[static_cast<std::size_t>(c)];
            if (i == j) {
              model.map.block(row, c, n, 1) = unit_column(i, i);
            } else {
              model.map.block(row, c, n, 1) = w * (unit_column(i, j) + unit_column(j, i));
            }
          }
          break;
        case Parametrization::diagonal:
          for (Index i = 0; i < m; ++i) model.map.block(row, i, n, 1) = unit_column(i, i);
          break;
      }
      row += n;
    }
  }
  return model;
}

bool zero_il_feasible(const std::vector<int>& rx_antennas,
                      const std::vector<int>& tx_antennas, int elements,
                      bool symmetric) {
  if (rx_antennas.size() != tx_antennas.size() || rx_antennas.empty()) {
    throw InvalidDimension("zero_il_feasible: antenna lists must match in length");
  }
  for (std::size_t k = 0; k < rx_antennas.size(); ++k) {
    if (elements < rx_antennas[k] || elements < tx_antennas[k]) {
      throw ContractViolation(
          "zero_il_feasible: requires M >= max(N_T, N_R) for every user");
    }
  }
  long long demand = 0;
  for (std::size_t k = 0; k < rx_antennas.size(); ++k) {
    for (std::size_t l = 0; l < tx_antennas.size(); ++l) {
      if (l != k) demand += static_cast<long long>(rx_antennas[k]) * tx_antennas[l];
    }
  }
  const long long m = elements;
  const long long dof = symmetric ? m * (m + 1) / 2 : m * m;
  return dof >= demand;
}

LinkMatrices effective_channels(const ChannelSet& ch, const Matrix& theta) {
  ch.validate();
  require_theta(ch, theta);
  const int k_users = ch.users();
  LinkMatrices eff(static_cast<std::size_t>(k_users),
                   std::vector<Matrix>(static_cast<std::size_t>(k_users)));
  for (int k = 0; k < k_users; ++k) {
    const Matrix f_theta = ch.f_ris[k] * theta;
    for (int l = 0; l < k_users; ++l) {
      eff[l][k] = ch.h_direct[l][k] + f_theta * ch.g_ris[l].adjoint();
    }
  }
  return eff;
}

ChannelSet precoded_channels(const ChannelSet& ch, const Beamformers& bf) {
  ch.validate();
  require_beamformers(ch, bf);
  const int k_users = ch.users();
  ChannelSet out;
  out.noise_power = ch.noise_power;
  out.h_direct.assign(static_cast<std::size_t>(k_users),
                      std::vector<Matrix>(static_cast<std::size_t>(k_users)));
  for (int l = 0; l < k_users; ++l) {
    for (int k = 0; k < k_users; ++k) {
      out.h_direct[l][k] = bf.u[k].adjoint() * ch.h_direct[l][k] * bf.v[l];
    }
  }
  for (int k = 0; k < k_users; ++k) {
    out.f_ris.push_back(bf.u[k].adjoint() * ch.f_ris[k]);
    out.g_ris.push_back(bf.v[k].adjoint() * ch.g_ris[k]);
  }
  return out;
}

double il_with_beamformers(const LinkMatrices& eff, const Beamformers& bf) {
  const auto k_users = eff.size();
  if (bf.u.size() != k_users || bf.v.size() != k_users) {
    throw InvalidDimension("il_with_beamformers: user count mismatch");
  }
  double il = 0.0;
  for (std::size_t k = 0; k < k_users; ++k) {
    for (std::size_t l = 0; l < k_users; ++l) {
      if (l == k) continue;
      const Matrix& h = eff[l][k];
      if (h.rows() != bf.u[k].rows() || h.cols() != bf.v[l].rows()) {
        throw InvalidDimension("il_with_beamformers: beamformer shape mismatch");
      }
      il += (bf.u[k].adjoint() * h * bf.v[l]).squaredNorm();
    }
  }
  return il;
}

double il_with_beamformers(const ChannelSet& ch, const Matrix& theta,
                           const Beamformers& bf) {
  require_beamformers(ch, bf);
  return il_with_beamformers(effective_channels(ch, theta), bf);
}

}  // namespace bdris
