#include "bdris/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bdris/linalg.hpp"

namespace bdris {

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidConfig(msg); };
  if (users < 2) fail("users must be >= 2");
  if (tx_antennas < 1 || rx_antennas < 1) fail("antenna counts must be >= 1");
  if (streams < 1 || streams > std::min(tx_antennas, rx_antennas)) {
    fail("streams must be in [1, min(tx_antennas, rx_antennas)]");
  }
  if (elements < 1) fail("elements must be >= 1");
  if (architecture != Architecture::diagonal &&
      elements < std::max(tx_antennas, rx_antennas)) {
    fail("BD-RIS needs elements >= max(tx_antennas, rx_antennas)");
  }
  if (architecture == Architecture::group) {
    if (group_size < 1 || elements % group_size != 0) {
      fail("group_size must divide elements");
    }
  }
  if (square_side <= 0.0) fail("square_side must be positive");
  if (bandwidth_hz <= 0.0) fail("bandwidth_hz must be positive");
  if (alpha_direct <= 0.0 || alpha_ris <= 0.0) fail("path-loss exponents must be positive");
  if (rician_gamma < 0.0) fail("rician_gamma must be non-negative");
  if (trials < 1) fail("trials must be >= 1");
}

double ScenarioConfig::pt_mw() const { return db_to_linear(pt_dbm); }

void ChannelSet::validate() const {
  const auto k = static_cast<std::size_t>(users());
  if (k == 0 || g_ris.size() != k || h_direct.size() != k) {
    throw InvalidDimension("ChannelSet: user count mismatch");
  }
  const Index m = elements();
  for (std::size_t l = 0; l < k; ++l) {
    if (h_direct[l].size() != k) throw InvalidDimension("ChannelSet: h_direct row size");
    if (g_ris[l].cols() != m || f_ris[l].cols() != m) {
      throw InvalidDimension("ChannelSet: RIS link column count mismatch");
    }
    for (std::size_t kk = 0; kk < k; ++kk) {
      const Matrix& h = h_direct[l][kk];
      if (h.rows() != f_ris[kk].rows() || h.cols() != g_ris[l].rows()) {
        throw InvalidDimension("ChannelSet: H_" + std::to_string(l) +
                               std::to_string(kk) + " shape mismatch");
      }
    }
  }
}

NodePositions node_positions(const ScenarioConfig& config) {
  if (config.users < 2) throw InvalidConfig("node_positions: users must be >= 2");
  NodePositions pos;
  const double side = config.square_side;
  const int k_users = config.users;
  for (int k = 0; k < k_users; ++k) {
    const double y = side * static_cast<double>(k) / static_cast<double>(k_users - 1);
    pos.tx.push_back({0.0, y, config.node_height});
    pos.rx.push_back({side, y, config.node_height});
  }
  return pos;
}

double distance(const Point3& a, const Point3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double path_loss_db(double r_m, double alpha) {
  if (!(r_m > 0.0)) throw InvalidConfig("path_loss_db: distance must be positive");
  return -28.0 - 10.0 * alpha * std::log10(r_m);
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0.0)) throw InvalidConfig("noise_power_dbm: bandwidth must be positive");
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

Vector steering_vector(Index n, const Point3& from, const Point3& to) {
  const double dx = to[0] - from[0];
  const double dy = to[1] - from[1];
  const double rho = std::hypot(dx, dy);
  const double sin_az = rho > 0.0 ? dy / rho : 0.0;
  Vector a(n);
  for (Index i = 0; i < n; ++i) {
    a(i) = std::polar(1.0, std::numbers::pi * static_cast<double>(i) * sin_az);
  }
  return a;
}

Matrix rician_mix(const Matrix& los, double gamma, std::mt19937_64& rng) {
  const Matrix scatter = linalg::complex_gaussian(los.rows(), los.cols(), rng);
  if (std::isinf(gamma)) return los;
  return std::sqrt(gamma / (1.0 + gamma)) * los +
         std::sqrt(1.0 / (1.0 + gamma)) * scatter;
}

ChannelSet draw_channels(const ScenarioConfig& config, std::mt19937_64& rng) {
  config.validate();
  const NodePositions pos = node_positions(config);
  const auto k_users = static_cast<std::size_t>(config.users);
  const Index nt = config.tx_antennas;
  const Index nr = config.rx_antennas;
  const Index m = config.elements;
  const Point3& ris = config.ris_position;

  ChannelSet ch;
  ch.h_direct.assign(k_users, std::vector<Matrix>(k_users));
  for (std::size_t l = 0; l < k_users; ++l) {
    for (std::size_t k = 0; k < k_users; ++k) {
      const double pl = db_to_linear(
          path_loss_db(distance(pos.tx[l], pos.rx[k]), config.alpha_direct));
      ch.h_direct[l][k] = std::sqrt(pl) * linalg::complex_gaussian(nr, nt, rng);
    }
  }
  for (std::size_t k = 0; k < k_users; ++k) {
    const double pl =
        db_to_linear(path_loss_db(distance(ris, pos.rx[k]), config.alpha_ris));
    const Matrix los = steering_vector(nr, pos.rx[k], ris) *
                       steering_vector(m, ris, pos.rx[k]).adjoint();
    ch.f_ris.push_back(std::sqrt(pl) * rician_mix(los, config.rician_gamma, rng));
  }
  for (std::size_t l = 0; l < k_users; ++l) {
    const double pl =
        db_to_linear(path_loss_db(distance(pos.tx[l], ris), config.alpha_ris));
    const Matrix los = steering_vector(nt, pos.tx[l], ris) *
                       steering_vector(m, ris, pos.tx[l]).adjoint();
    ch.g_ris.push_back(std::sqrt(pl) * rician_mix(los, config.rician_gamma, rng));
  }
  ch.noise_power =
      db_to_linear(noise_power_dbm(config.bandwidth_hz, config.noise_figure_db));
  return ch;
}

}  // namespace bdris
