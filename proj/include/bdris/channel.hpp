#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bdris/scattering.hpp"
#include "bdris/types.hpp"

namespace bdris {

using Point3 = std::array<double, 3>;

/// Simulation scenario: geometry, antennas, power budget and fading.
struct ScenarioConfig {
  int users = 3;         // K
  int tx_antennas = 3;   // N_T
  int rx_antennas = 3;   // N_R
  int streams = 2;       // d
  int elements = 40;     // M
  Architecture architecture = Architecture::fully;
  int group_size = 0;    // M_g, group architecture only
  Point3 ris_position{40.0, 25.0, 5.0};
  double square_side = 50.0;
  double node_height = 1.5;
  double pt_dbm = 10.0;
  double bandwidth_hz = 40e6;
  double noise_figure_db = 10.0;
  double alpha_direct = 3.75;
  double alpha_ris = 2.0;
  double rician_gamma = 3.0;
  int trials = 20;
  std::uint64_t seed = 1;

  /// Throws InvalidConfig on inconsistent fields.
  void validate() const;
  double pt_mw() const;
};

/// All links of one channel draw. h_direct[l][k] is Tx l -> Rx k.
struct ChannelSet {
  std::vector<std::vector<Matrix>> h_direct;  // N_R x N_T
  std::vector<Matrix> f_ris;                  // F_k, N_R x M
  std::vector<Matrix> g_ris;                  // G_l, N_T x M
  double noise_power = 0.0;                   // sigma^2, mW

  int users() const { return static_cast<int>(f_ris.size()); }
  Index elements() const { return f_ris.empty() ? 0 : f_ris.front().cols(); }

  /// Throws InvalidDimension if the link shapes are inconsistent.
  void validate() const;
};

struct NodePositions {
  std::vector<Point3> tx;
  std::vector<Point3> rx;
};

NodePositions node_positions(const ScenarioConfig& config);

double distance(const Point3& a, const Point3& b);

/// Large-scale path loss -28 - 10*alpha*log10(r) in dB.
double path_loss_db(double r_m, double alpha);

/// Thermal noise -174 + 10*log10(B) + F in dBm.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Half-wavelength ULA steering vector for an array laid along the y axis,
/// pointing from `from` towards `to` (azimuth in the xy-plane).
Vector steering_vector(Index n, const Point3& from, const Point3& to);

/// sqrt(gamma/(1+gamma)) * los + sqrt(1/(1+gamma)) * CN(0,1) scatter.
Matrix rician_mix(const Matrix& los, double gamma, std::mt19937_64& rng);

/// One draw of all direct (Rayleigh) and RIS (Rician) links.
ChannelSet draw_channels(const ScenarioConfig& config, std::mt19937_64& rng);

}  // namespace bdris
