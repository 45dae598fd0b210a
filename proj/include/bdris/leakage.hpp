#pragma once

#include <vector>

#include "bdris/channel.hpp"
#include "bdris/scattering.hpp"
#include "bdris/types.hpp"

namespace bdris {

/// Per-user precoders v[k] (N_T x d_k) and decoders u[k] (N_R x d_k).
struct Beamformers {
  std::vector<Matrix> v;
  std::vector<Matrix> u;
};

/// Equivalent links indexed [l][k] (Tx l -> Rx k).
using LinkMatrices = std::vector<std::vector<Matrix>>;

enum class QuadraticMode { bdris, diagonal };

/// IL(r) = t_trace + r^H sigma_big r + 2 Re(r^H s_vec), with r = vec(theta)
/// for a BD-RIS or r = diag(theta) for a diagonal RIS.
struct IlQuadraticForm {
  Matrix sigma_big;
  Vector s_vec;
  double t_trace = 0.0;
  QuadraticMode mode = QuadraticMode::bdris;

  double evaluate(const Vector& r) const;
};

/// How the RIS unknowns are laid out in a StackedLeakageModel.
enum class Parametrization {
  full,       // r = vec(theta), M^2 unknowns
  symmetric,  // vec(theta) = N x, M(M+1)/2 unknowns
  diagonal,   // r = diag(theta), M unknowns
};

/// IL(x) = ||offset + map * x||^2, the interfering links stacked row-wise.
/// map^H map is the quadratic-form matrix restricted to the parametrization.
struct StackedLeakageModel {
  Matrix map;
  Vector offset;
  Parametrization parametrization = Parametrization::full;
};

/// sum_{l != k} ||H_lk + F_k theta G_l^H||_F^2
double interference_leakage(const ChannelSet& ch, const Matrix& theta);
double interference_leakage(const ChannelSet& ch, const ScatteringMatrix& s);

/// tr(T) = sum_{l != k} ||H_lk||_F^2, the leakage without a RIS.
double direct_leakage(const ChannelSet& ch);

IlQuadraticForm il_quadratic_form(const ChannelSet& ch, QuadraticMode mode);

StackedLeakageModel stacked_leakage_model(const ChannelSet& ch,
                                          Parametrization parametrization);

/// Zero-leakage condition for an unconstrained (or symmetric) RIS:
/// M^2 (or M(M+1)/2) >= sum_{l != k} N_Rk N_Tl. Requires M >= every antenna count.
bool zero_il_feasible(const std::vector<int>& rx_antennas,
                      const std::vector<int>& tx_antennas, int elements,
                      bool symmetric);

/// H_lk + F_k theta G_l^H for every (l, k).
LinkMatrices effective_channels(const ChannelSet& ch, const Matrix& theta);

/// Links after precoding and decoding: H_lk -> U_k^H H_lk V_l,
/// F_k -> U_k^H F_k and G_l -> V_l^H G_l.
ChannelSet precoded_channels(const ChannelSet& ch, const Beamformers& bf);

/// sum_{l != k} ||U_k^H (H_lk + F_k theta G_l^H) V_l||_F^2
double il_with_beamformers(const ChannelSet& ch, const Matrix& theta,
                           const Beamformers& bf);
double il_with_beamformers(const LinkMatrices& eff, const Beamformers& bf);

}  // namespace bdris
