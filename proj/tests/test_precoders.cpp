#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdris/leakage.hpp"
#include "bdris/linalg.hpp"
#include "bdris/precoders.hpp"
#include "support.hpp"

using namespace bdris;

namespace {

LinkMatrices random_links(int users, Index nr, Index nt, std::mt19937_64& rng) {
  LinkMatrices eff(users, std::vector<Matrix>(users));
  for (auto& row : eff)
    for (auto& h : row) h = linalg::complex_gaussian(nr, nt, rng);
  return eff;
}

double orthonormality_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

// Largest principal-angle sine between two column spans.
double subspace_gap(const Matrix& a, const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qa(a), qb(b);
  const Matrix oa = qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix ob = qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Matrix> svd(oa.adjoint() * ob);
  const double cmin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - cmin * cmin));
}

}  // namespace

TEST_CASE("waterfilling") {
  RealVector equal(2);
  equal << 1.0, 1.0;
  const PowerAllocation a = waterfill(equal, 4.0, 1.0);
  CHECK(a.powers(0) == doctest::Approx(2.0));
  CHECK(a.powers(1) == doctest::Approx(2.0));

  RealVector uneven(2);
  uneven << 1.0, 1e-9;
  const PowerAllocation b = waterfill(uneven, 1.0, 10.0);
  CHECK(b.powers(0) == doctest::Approx(1.0));
  CHECK(b.powers(1) == 0.0);

  RealVector g(3);
  g << 4.0, 1.0, 0.25;
  const PowerAllocation c = waterfill(g, 2.0, 1.0);
  CHECK(c.powers.sum() == doctest::Approx(2.0));
  for (Index i = 0; i < 3; ++i) {
    if (c.powers(i) > 0.0) CHECK(c.powers(i) + 1.0 / g(i) == doctest::Approx(c.water_level));
    else CHECK(1.0 / g(i) >= c.water_level);
  }
  CHECK(waterfill(RealVector::Zero(2), 1.0, 1.0).powers.sum() == 0.0);
}

TEST_CASE("svd precoders reach the single-user capacity") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const LinkMatrices eff = random_links(1, 3, 3, rng);
  const double p = 10.0, s2 = 1.0;
  const PrecoderReport rep = svd_precoders(eff, p, s2);
  const double achieved = sum_rate(eff, rep.beamformers, s2);
  CHECK(transmit_power(rep.beamformers.v[0]) == doctest::Approx(p));

  Eigen::JacobiSVD<Matrix> svd(eff[0][0]);
  const RealVector gains = svd.singularValues().array().square();
  double best = 0.0;
  for (int i = 0; i < 100000; ++i) {
    RealVector w(3);
    for (Index j = 0; j < 3; ++j) w(j) = -std::log(unif(rng) + 1e-300);
    w *= p / w.sum();
    double r = 0.0;
    for (Index j = 0; j < 3; ++j) r += std::log2(1.0 + w(j) * gains(j) / s2);
    best = std::max(best, r);
  }
  CHECK(achieved >= best - 1e-6);
}

TEST_CASE("rate evaluation") {
  std::mt19937_64 rng(2);
  const LinkMatrices eff = random_links(3, 3, 3, rng);
  Beamformers bf;
  for (int k = 0; k < 3; ++k) bf.v.push_back(linalg::complex_gaussian(3, 2, rng));
  for (int k = 0; k < 3; ++k) {
    CHECK(rate_of_user(eff, bf, 0.7, k) ==
          doctest::Approx(rate_of_user_eigen(eff, bf, 0.7, k)).epsilon(1e-10));
  }
  const auto rates = user_rates(eff, bf, 0.7);
  CHECK(sum_rate(eff, bf, 0.7) == doctest::Approx(rates[0] + rates[1] + rates[2]).epsilon(1e-12));

  Beamformers silent = bf;
  silent.v[1].setZero();
  CHECK(rate_of_user(eff, silent, 0.7, 1) == 0.0);

  LinkMatrices awgn(1, std::vector<Matrix>(1, Matrix::Identity(2, 2)));
  Beamformers one;
  one.v = {Matrix(Vector::Unit(2, 0) * std::sqrt(3.0))};
  CHECK(rate_of_user(awgn, one, 0.5, 0) == doctest::Approx(std::log2(1.0 + 3.0 / 0.5)));
}

TEST_CASE("min-IL alternating design") {
  std::mt19937_64 rng(3);
  SUBCASE("single user leaks nothing") {
    const LinkMatrices eff = random_links(1, 3, 3, rng);
    const PrecoderReport r = min_il_beamformers(eff, 2, 1.0, 10);
    CHECK(r.objective.back() == 0.0);
    CHECK(orthonormality_defect(r.beamformers.u[0]) < 1e-12);
  }
  SUBCASE("engineered interference-free subspace") {
    // Tx l reaches Rx k != l only through receive dimension 2 of a 3-antenna array.
    LinkMatrices eff = random_links(3, 3, 3, rng);
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        if (l != k) eff[l][k].topRows(2).setZero();
    const PrecoderReport r = min_il_beamformers(eff, 2, 1.0, 50);
    double t = 0.0;
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        if (l != k) t += eff[l][k].squaredNorm();
    CHECK(r.objective.back() <= 1e-9 * t);
  }
  SUBCASE("half-steps are monotone and power feasible") {
    const LinkMatrices eff = random_links(3, 3, 3, rng);
    const PrecoderReport r = min_il_beamformers(eff, 2, 2.0, 100);
    for (std::size_t i = 1; i < r.objective.size(); ++i)
      CHECK(r.objective[i] <= r.objective[i - 1] * (1.0 + 1e-8));
    for (int k = 0; k < 3; ++k) {
      CHECK(transmit_power(r.beamformers.v[k]) == doctest::Approx(2.0));
      CHECK(orthonormality_defect(r.beamformers.u[k]) < 1e-10);
    }
  }
  CHECK_THROWS_AS(min_il_beamformers(random_links(2, 2, 2, rng), 3, 1.0, 5), InvalidDimension);
}

TEST_CASE("max-SINR design") {
  std::mt19937_64 rng(4);
  SUBCASE("single user, single stream is the dominant singular pair") {
    const LinkMatrices eff = random_links(1, 3, 3, rng);
    const double p = 2.0, s2 = 0.3;
    const PrecoderReport r = max_sinr_beamformers(eff, 1, p, s2, 200);
    Eigen::JacobiSVD<Matrix> svd(eff[0][0], Eigen::ComputeFullV);
    const double smax = svd.singularValues()(0);
    CHECK(subspace_gap(r.beamformers.v[0], svd.matrixV().col(0)) < 1e-6);
    CHECK(sum_rate(eff, r.beamformers, s2) ==
          doctest::Approx(std::log2(1.0 + p * smax * smax / s2)).epsilon(1e-9));
  }
  SUBCASE("interference-free links recover the SVD directions") {
    LinkMatrices eff = random_links(2, 3, 3, rng);
    eff[0][1].setZero();
    eff[1][0].setZero();
    const PrecoderReport r = max_sinr_beamformers(eff, 2, 1.0, 1e-3, 500, 1e-14);
    for (int k = 0; k < 2; ++k) {
      Eigen::JacobiSVD<Matrix> svd(eff[k][k], Eigen::ComputeFullV);
      CHECK(subspace_gap(r.beamformers.v[k], svd.matrixV().leftCols(2)) < 1e-6);
      CHECK(orthonormality_defect(r.beamformers.u[k]) < 1e-10);
    }
  }
}

TEST_CASE("rate surrogate") {
  std::mt19937_64 rng(5);
  const double s2 = 0.5, p = 2.0;
  const LinkMatrices eff = random_links(3, 3, 3, rng);
  std::vector<Matrix> vbar;
  for (int k = 0; k < 3; ++k) vbar.push_back(linalg::complex_gaussian(3, 2, rng) * 0.7);
  const SurrogateCoefficients sc = surrogate_coefficients(eff, vbar, s2);
  const Beamformers at_bar{vbar, {}};
  for (int k = 0; k < 3; ++k) {
    const double exact = rate_of_user(eff, at_bar, s2, k) * std::numbers::ln2;
    CHECK(std::abs(surrogate_rate(sc, eff, vbar, s2, k) - exact) <= 1e-9);
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Matrix> v;
    for (int k = 0; k < 3; ++k) {
      Matrix m = linalg::complex_gaussian(3, 2, rng);
      v.push_back(m * std::sqrt(p) / m.norm());
    }
    const Beamformers bf{v, {}};
    for (int k = 0; k < 3; ++k) {
      CHECK(surrogate_rate(sc, eff, v, s2, k) <= rate_of_user(eff, bf, s2, k) * std::numbers::ln2 + 1e-9);
    }
  }

  SUBCASE("no cross links") {
    LinkMatrices iso = eff;
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        if (l != k) iso[l][k].setZero();
    const SurrogateCoefficients c = surrogate_coefficients(iso, vbar, s2);
    const Matrix hv = iso[1][1] * vbar[1];
    const Matrix expect_b = Matrix::Identity(3, 3) / s2 -
                            (s2 * Matrix::Identity(3, 3) + hv * hv.adjoint()).inverse();
    CHECK((c.b_mat[1] - expect_b).norm() < 1e-10);
    CHECK((c.r_mat[1] - Matrix::Identity(3, 3) / s2).norm() < 1e-12);
  }
}

TEST_CASE("max-SR majorization-minimization") {
  std::mt19937_64 rng(6);
  SUBCASE("single user reaches the waterfilling rate") {
    const LinkMatrices eff = random_links(1, 3, 3, rng);
    const double p = 5.0, s2 = 0.4;
    Matrix v0 = linalg::complex_gaussian(3, 3, rng);
    v0 *= std::sqrt(p) / v0.norm();
    const PrecoderReport r = max_sr_beamformers(eff, {v0}, p, s2, 2000, 1e-14);
    const double wf = sum_rate(eff, svd_precoders(eff, p, s2).beamformers, s2);
    CHECK(std::abs(r.objective.back() - wf) <= 1e-6 * wf);
  }
  SUBCASE("sum rate never decreases") {
    const LinkMatrices eff = random_links(3, 3, 3, rng);
    const double p = 3.0, s2 = 0.2;
    const auto init = svd_precoders(eff, p, s2, 2).beamformers.v;
    const PrecoderReport r = max_sr_beamformers(eff, init, p, s2, 50, 0.0);
    for (std::size_t i = 1; i < r.objective.size(); ++i)
      CHECK(r.objective[i] >= r.objective[i - 1] - 1e-8 * std::abs(r.objective[i - 1]));
    for (int k = 0; k < 3; ++k) {
      CHECK(transmit_power(r.beamformers.v[k]) <= p * (1.0 + 1e-9));
      CHECK(orthonormality_defect(r.beamformers.u[k]) < 1e-10);
    }
    CHECK(r.objective.back() >= r.objective.front());
  }
  SUBCASE("rejects an over-budget start") {
    const LinkMatrices eff = random_links(2, 2, 2, rng);
    const std::vector<Matrix> v(2, 10.0 * Matrix::Identity(2, 2));
    CHECK_THROWS_AS(max_sr_beamformers(eff, v, 1.0, 1.0, 5), ContractViolation);
  }
}
