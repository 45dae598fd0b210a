#pragma once

#include <string>
#include <vector>

#include "bdris/leakage.hpp"
#include "bdris/types.hpp"

namespace bdris {

/// Per-stream powers from water-filling: p_i = max(0, level - noise / g_i).
struct PowerAllocation {
  RealVector powers;
  double water_level = 0.0;
};

PowerAllocation waterfill(const RealVector& gains, double total_power, double noise);

/// Output of a Stage-II design, with the objective trace of iterative designs.
struct PrecoderReport {
  Beamformers beamformers;
  std::vector<double> objective;  // IL for min-IL, sum rate [bit/s/Hz] otherwise
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Interference-oblivious SVD precoders with water-filled powers on the
/// strongest `max_streams` modes (<= 0: min(N_T, N_R)).
PrecoderReport svd_precoders(const LinkMatrices& eff, double p_t, double sigma2,
                             Index max_streams = 0);

/// Alternating leakage minimization: decoders from the d smallest
/// eigenvectors of the receive interference covariance, precoders from the
/// reciprocal network. Each precoder carries p_t split equally over d streams.
/// objective[] holds the leakage after every half-step.
PrecoderReport min_il_beamformers(const LinkMatrices& eff, Index d, double p_t,
                                  int iters, double rel_tol = 1e-12);

/// Single half-steps of the leakage AO, in place.
void update_min_il_decoders(const LinkMatrices& eff, Beamformers& bf, Index d);
void update_min_il_precoders(const LinkMatrices& eff, Beamformers& bf, Index d,
                             double p_t);

/// Per-stream max-SINR alternating design with equal stream power p_t / d.
PrecoderReport max_sinr_beamformers(const LinkMatrices& eff, Index d, double p_t,
                                    double sigma2, int iters, double rel_tol = 1e-10);

/// Achievable rate of user k in bit/s/Hz, treating interference as noise.
double rate_of_user(const LinkMatrices& eff, const Beamformers& bf, double sigma2, int k);

/// Same quantity through the eigenvalues of the whitened signal covariance.
double rate_of_user_eigen(const LinkMatrices& eff, const Beamformers& bf,
                          double sigma2, int k);

std::vector<double> user_rates(const LinkMatrices& eff, const Beamformers& bf,
                               double sigma2);
double sum_rate(const LinkMatrices& eff, const Beamformers& bf, double sigma2);

/// Coefficients of the concave minorizer of r_k (natural log) expanded at
/// v_bar. Only the diagonal blocks a_mat[k][k] are non-zero.
struct SurrogateCoefficients {
  std::vector<double> a;                   // a_k
  std::vector<std::vector<Matrix>> a_mat;  // A_lk, indexed [l][k]
  std::vector<Matrix> b_mat;               // B_k, Hermitian PSD
  std::vector<Matrix> r_mat;               // R_k(v_bar)
};

SurrogateCoefficients surrogate_coefficients(const LinkMatrices& eff,
                                             const std::vector<Matrix>& v_bar,
                                             double sigma2);

/// Surrogate value (nats) of user k at precoders v.
double surrogate_rate(const SurrogateCoefficients& sc, const LinkMatrices& eff,
                      const std::vector<Matrix>& v, double sigma2, int k);

/// Majorization-minimization for the sum rate. Each iteration solves the
/// per-user concave surrogate in closed form with a bisected power multiplier.
/// objective[] holds the true sum rate after every iteration.
PrecoderReport max_sr_beamformers(const LinkMatrices& eff,
                                  const std::vector<Matrix>& v_init, double p_t,
                                  double sigma2, int mm_iters, double rel_tol = 1e-10);

/// MMSE-receiver span, orthonormalized, for given precoders.
std::vector<Matrix> mmse_decoders(const LinkMatrices& eff, const std::vector<Matrix>& v,
                                  double sigma2);

/// Total transmit power tr(V V^H).
inline double transmit_power(const Matrix& v) { return v.squaredNorm(); }

}  // namespace bdris
