#include <doctest.h>

#include <cmath>
#include <limits>

#include "bdris/channel.hpp"
#include "bdris/scattering.hpp"
#include "support.hpp"

using namespace bdris;

TEST_CASE("node positions") {
  ScenarioConfig cfg;
  const NodePositions p = node_positions(cfg);
  REQUIRE(p.tx.size() == 3);
  const double ys[] = {0.0, 25.0, 50.0};
  for (int k = 0; k < 3; ++k) {
    CHECK(p.tx[k] == Point3{0.0, ys[k], 1.5});
    CHECK(p.rx[k] == Point3{50.0, ys[k], 1.5});
  }
  CHECK(p.rx[1] == Point3{50.0, 25.0, 1.5});

  cfg.users = 2;
  const NodePositions p2 = node_positions(cfg);
  CHECK(p2.tx[0][1] == 0.0);
  CHECK(p2.tx[1][1] == 50.0);

  cfg.users = 1;
  CHECK_THROWS_AS(node_positions(cfg), InvalidConfig);
}

TEST_CASE("path loss") {
  CHECK(path_loss_db(1.0, 2.0) == doctest::Approx(-28.0));
  CHECK(path_loss_db(10.0, 2.0) == doctest::Approx(-48.0));
  CHECK(path_loss_db(10.0, 3.75) == doctest::Approx(-65.5));
  CHECK(path_loss_db(5.0, 2.0) > path_loss_db(6.0, 2.0));
  CHECK_THROWS_AS(path_loss_db(0.0, 2.0), InvalidConfig);
  CHECK_THROWS_AS(path_loss_db(-1.0, 2.0), InvalidConfig);
}

TEST_CASE("noise power") {
  CHECK(noise_power_dbm(40e6, 10.0) == doctest::Approx(-87.9794).epsilon(1e-5));
  CHECK(noise_power_dbm(1.0, 0.0) == doctest::Approx(-174.0));
  CHECK(noise_power_dbm(1e6, 0.0) == doctest::Approx(-114.0));
}

TEST_CASE("steering vectors are unit modulus") {
  const Vector a = steering_vector(8, {0, 0, 1.5}, {40, 25, 5});
  for (Index i = 0; i < a.size(); ++i) CHECK(std::abs(a(i)) == doctest::Approx(1.0));
  CHECK(a(0) == Complex(1.0, 0.0));
}

TEST_CASE("rician mixing limits") {
  std::mt19937_64 rng(1);
  const Matrix los = steering_vector(3, {0, 0, 0}, {1, 1, 0}) *
                     steering_vector(4, {1, 1, 0}, {0, 0, 0}).adjoint();
  CHECK(rician_mix(los, std::numeric_limits<double>::infinity(), rng) == los);

  std::mt19937_64 a(2), b(2);
  CHECK(rician_mix(los, 0.0, a) == linalg::complex_gaussian(3, 4, b));
}

TEST_CASE("direct-link second moment matches path loss") {
  ScenarioConfig cfg;
  cfg.elements = 4;
  const NodePositions pos = node_positions(cfg);
  const double expected = db_to_linear(path_loss_db(distance(pos.tx[0], pos.rx[2]), 3.75));
  std::mt19937_64 rng(77);
  double acc = 0.0;
  const int draws = 10000 / 9 + 1;
  int count = 0;
  for (int i = 0; i < draws; ++i) {
    const ChannelSet ch = draw_channels(cfg, rng);
    acc += ch.h_direct[0][2].squaredNorm();
    count += 9;
  }
  CHECK(acc / count == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("draw_channels shapes and determinism") {
  ScenarioConfig cfg;
  cfg.elements = 12;
  cfg.tx_antennas = 2;
  cfg.rx_antennas = 3;
  std::mt19937_64 r1(5), r2(5);
  const ChannelSet a = draw_channels(cfg, r1);
  const ChannelSet b = draw_channels(cfg, r2);
  CHECK_NOTHROW(a.validate());
  CHECK(a.h_direct[1][2].rows() == 3);
  CHECK(a.h_direct[1][2].cols() == 2);
  CHECK(a.f_ris[0].cols() == 12);
  CHECK(a.g_ris[0].rows() == 2);
  for (int l = 0; l < 3; ++l) {
    CHECK(a.f_ris[l] == b.f_ris[l]);
    CHECK(a.g_ris[l] == b.g_ris[l]);
    for (int k = 0; k < 3; ++k) CHECK(a.h_direct[l][k] == b.h_direct[l][k]);
  }
  CHECK(a.noise_power == doctest::Approx(db_to_linear(-87.9794)).epsilon(1e-4));
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.streams = 4;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = ScenarioConfig{};
  cfg.elements = 2;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg.architecture = Architecture::diagonal;
  CHECK_NOTHROW(cfg.validate());
  cfg = ScenarioConfig{};
  cfg.architecture = Architecture::group;
  cfg.group_size = 7;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg.group_size = 8;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("architecture feasibility") {
  std::mt19937_64 rng(3);
  const Matrix su = testing::random_symmetric_unitary(6, rng);
  CHECK(is_feasible({su, Architecture::fully, 0}));
  CHECK_FALSE(is_feasible({linalg::random_unitary(6, rng), Architecture::fully, 0}));

  Matrix blocks = Matrix::Zero(6, 6);
  blocks.block(0, 0, 3, 3) = testing::random_symmetric_unitary(3, rng);
  blocks.block(3, 3, 3, 3) = testing::random_symmetric_unitary(3, rng);
  CHECK(is_feasible({blocks, Architecture::group, 3}));
  CHECK_FALSE(is_feasible({su, Architecture::group, 3}));

  Matrix diag = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) diag(i, i) = std::polar(1.0, 0.3 * i);
  CHECK(is_feasible({diag, Architecture::diagonal, 0}));
  diag(0, 0) *= 1.01;
  CHECK_FALSE(is_feasible({diag, Architecture::diagonal, 0}));

  CHECK(is_feasible({0.5 * su, Architecture::relaxed_symmetric, 0}));
  CHECK_FALSE(is_feasible({2.0 * su, Architecture::relaxed_symmetric, 0}));
}
