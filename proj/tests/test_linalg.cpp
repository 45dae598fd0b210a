#include <doctest.h>

#include <cmath>
#include <complex>

#include "bdris/linalg.hpp"
#include "support.hpp"

using namespace bdris;
using namespace bdris::linalg;

TEST_CASE("commutation matrix") {
  CHECK(commutation_matrix(1) == Matrix::Identity(1, 1));

  Matrix p2 = Matrix::Identity(4, 4);
  p2.row(1).swap(p2.row(2));
  CHECK(commutation_matrix(2) == p2);

  std::mt19937_64 rng(3);
  const Matrix a = complex_gaussian(5, 5, rng);
  const Matrix p = commutation_matrix(5);
  CHECK((p * vec(a) - vec(a.transpose())).norm() == 0.0);
  CHECK((p * p - Matrix::Identity(25, 25)).norm() == 0.0);
  CHECK_THROWS_AS(commutation_matrix(0), InvalidDimension);
}

TEST_CASE("vec and unvec are inverse") {
  std::mt19937_64 rng(4);
  const Matrix a = complex_gaussian(3, 4, rng);
  CHECK(unvec(vec(a), 3) == a);
  CHECK(vec(a)(1) == a(1, 0));
  CHECK(vec(a)(3) == a(0, 1));
}

TEST_CASE("symmetric null-space basis") {
  CHECK(symmetric_nullspace_basis(1) == Matrix::Identity(1, 1));

  const Matrix n2 = symmetric_nullspace_basis(2);
  REQUIRE(n2.rows() == 4);
  REQUIRE(n2.cols() == 3);
  const double h = 1.0 / std::sqrt(2.0);
  Matrix expect = Matrix::Zero(4, 3);
  expect(0, 0) = 1.0;            // e11
  expect(1, 1) = expect(2, 1) = h;  // (e12 + e21) / sqrt 2
  expect(3, 2) = 1.0;            // e22
  CHECK((n2 - expect).norm() < 1e-15);
  CHECK(((Matrix::Identity(4, 4) - commutation_matrix(2)) * n2).norm() < 1e-15);

  const Matrix n4 = symmetric_nullspace_basis(4);
  CHECK(n4.rows() == 16);
  CHECK(n4.cols() == 10);
  CHECK((n4.adjoint() * n4 - Matrix::Identity(10, 10)).norm() < 1e-12);

  std::mt19937_64 rng(5);
  const Vector x = complex_gaussian(10, 1, rng);
  CHECK(symmetry_defect(unvec(n4 * x, 4)) < 1e-15);
}

TEST_CASE("takagi factorization") {
  SUBCASE("identity") {
    const TakagiFactors t = takagi(Matrix::Identity(3, 3));
    CHECK((t.sigma - RealVector::Ones(3)).norm() < 1e-12);
    CHECK(unitarity_defect(t.q) < 1e-12);
    CHECK((t.q * t.q.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
  }
  SUBCASE("diagonal phases") {
    const double p1 = 0.7, p2 = -2.1;
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = std::polar(1.0, p1);
    a(1, 1) = std::polar(1.0, p2);
    const TakagiFactors t = takagi(a);
    CHECK((t.sigma - RealVector::Ones(2)).norm() < 1e-12);
    CHECK((t.q * t.sigma.asDiagonal() * t.q.transpose() - a).norm() < 1e-12);
  }
  SUBCASE("random symmetric 8x8") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix a = testing::random_symmetric(8, rng);
      const TakagiFactors t = takagi(a);
      CHECK((t.q * t.sigma.asDiagonal() * t.q.transpose() - a).norm() < 1e-10);
      CHECK(unitarity_defect(t.q) < 1e-10);
      for (Index i = 1; i < 8; ++i) CHECK(t.sigma(i) <= t.sigma(i - 1));
    }
  }
  SUBCASE("repeated and zero singular values") {
    std::mt19937_64 rng(7);
    const Matrix u = random_unitary(6, rng);
    RealVector s(6);
    s << 2.0, 2.0, 2.0, 0.5, 0.0, 0.0;
    const Matrix a = u * s.asDiagonal() * u.transpose();
    const TakagiFactors t = takagi(a);
    CHECK((t.q * t.sigma.asDiagonal() * t.q.transpose() - a).norm() < 1e-10);
    CHECK((t.sigma - s).norm() < 1e-10);
    CHECK(unitarity_defect(t.q) < 1e-10);
  }
  SUBCASE("non-symmetric input") {
    std::mt19937_64 rng(8);
    CHECK_THROWS_AS(takagi(complex_gaussian(3, 3, rng)), ContractViolation);
  }
}

TEST_CASE("skew-Hermitian exponential") {
  CHECK((expm_skew_hermitian(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-15);

  const double th = 0.83;
  Matrix b = Matrix::Zero(2, 2);
  b(0, 1) = th;
  b(1, 0) = -th;
  Matrix rot(2, 2);
  rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
  CHECK((expm_skew_hermitian(b) - rot).norm() < 1e-14);

  // Truncated power series as an independent route.
  Matrix series = Matrix::Identity(2, 2);
  Matrix term = Matrix::Identity(2, 2);
  for (int n = 1; n < 30; ++n) {
    term = term * b / static_cast<double>(n);
    series += term;
  }
  CHECK((expm_skew_hermitian(b) - series).norm() < 1e-14);

  std::mt19937_64 rng(9);
  const Matrix g = complex_gaussian(10, 10, rng);
  const Matrix r = expm_skew_hermitian(g - g.adjoint());
  CHECK((r.adjoint() * r - Matrix::Identity(10, 10)).norm() <= 1e-10);

  CHECK_THROWS_AS(expm_skew_hermitian(g), ContractViolation);
}

TEST_CASE("projection onto symmetric unitary matrices") {
  std::mt19937_64 rng(10);
  const Matrix theta = testing::random_symmetric_unitary(5, rng);
  CHECK((project_to_unitary(theta) - theta).norm() < 1e-8);

  CHECK((project_to_unitary(0.5 * Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() <
        1e-12);

  for (int rep = 0; rep < 5; ++rep) {
    const Matrix a = testing::random_symmetric(6, rng);
    const Matrix p1 = project_to_unitary(a);
    const Matrix p2 = project_to_unitary_svd(a);
    CHECK((p1 - p2).norm() < 1e-8);
    CHECK(unitarity_defect(p1) < 1e-10);
    CHECK(symmetry_defect(p1) < 1e-10);
  }
}

TEST_CASE("random unitary") {
  CHECK(std::abs(std::abs(random_unitary(1, 42)(0, 0)) - 1.0) < 1e-15);
  CHECK(random_unitary(7, 11) == random_unitary(7, 11));
  const Matrix q = random_unitary(16, 12);
  CHECK((q.adjoint() * q - Matrix::Identity(16, 16)).norm() <= 1e-12);
}

TEST_CASE("smallest eigenvectors") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 3.0;
  h(1, 1) = 1.0;
  h(2, 2) = 2.0;
  const Matrix v = smallest_eigenvectors(h, 2);
  REQUIRE(v.cols() == 2);
  CHECK(std::abs(v(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(v(2, 1)) == doctest::Approx(1.0));
}
