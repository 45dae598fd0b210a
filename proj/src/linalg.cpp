#include "bdris/linalg.hpp"

#include <cmath>
#include <numbers>

namespace bdris::linalg {

namespace {

constexpr double kZeroSingularRel = 1e-12;
constexpr double kClusterRel = 1e-8;

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw InvalidDimension(std::string(what) + ": matrix must be square, got " +
                           std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()));
  }
}

void require_symmetric(const Matrix& a, const char* what) {
  require_square(a, what);
  const double norm = a.norm();
  if ((a - a.transpose()).norm() > kSymmetryTol * std::max(1.0, norm)) {
    throw ContractViolation(std::string(what) + ": input is not symmetric");
  }
}

// Takagi factors of a symmetric block whose singular values are all close to
// a common positive value. Uses the real 2m x 2m symmetric embedding
// [[Re B, Im B], [Im B, -Re B]], whose eigenpairs (s, [x; y]) give
// B * conj(x + iy) = s * (x + iy).
void takagi_cluster(const Matrix& block, Matrix& q, RealVector& sigma) {
  const Index m = block.rows();
  if (m == 1) {
    const Complex b = block(0, 0);
    q.resize(1, 1);
    q(0, 0) = std::polar(1.0, std::arg(b) / 2.0);
    sigma.resize(1);
    sigma(0) = std::abs(b);
    return;
  }
  const Matrix sym = 0.5 * (block + block.transpose());
  const Eigen::MatrixXd x = sym.real();
  const Eigen::MatrixXd y = sym.imag();
  Eigen::MatrixXd embed(2 * m, 2 * m);
  embed << x, y, y, -x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(embed);
  q.resize(m, m);
  sigma.resize(m);
  for (Index j = 0; j < m; ++j) {
    const Index col = 2 * m - 1 - j;
    const auto v = eig.eigenvectors().col(col);
    for (Index i = 0; i < m; ++i) q(i, j) = Complex(v(i), v(m + i));
    sigma(j) = std::max(0.0, eig.eigenvalues()(col));
  }
}

}  // namespace

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& r, Index rows) {
  if (rows <= 0 || r.size() % rows != 0) {
    throw InvalidDimension("unvec: length " + std::to_string(r.size()) +
                           " not divisible by " + std::to_string(rows));
  }
  return Eigen::Map<const Matrix>(r.data(), rows, r.size() / rows);
}

Matrix commutation_matrix(Index m) {
  if (m < 1) throw InvalidDimension("commutation_matrix: m must be >= 1");
  Matrix p = Matrix::Zero(m * m, m * m);
  // vec(A)[i + j*m] = A(i,j); vec(A^T)[j + i*m] = A(i,j).
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) p(j + i * m, i + j * m) = 1.0;
  }
  return p;
}

std::vector<SymmetricIndexPair> symmetric_index_pairs(Index m) {
  if (m < 1) throw InvalidDimension("symmetric_index_pairs: m must be >= 1");
  std::vector<SymmetricIndexPair> pairs;
  pairs.reserve(static_cast<std::size_t>(m * (m + 1) / 2));
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i <= j; ++i) pairs.push_back({i, j});
  }
  return pairs;
}

Matrix symmetric_nullspace_basis(Index m) {
  const auto pairs = symmetric_index_pairs(m);
  Matrix n = Matrix::Zero(m * m, static_cast<Index>(pairs.size()));
  const double w = 1.0 / std::numbers::sqrt2;
  for (Index c = 0; c < static_cast<Index>(pairs.size()); ++c) {
    const auto [i, j] = pairs[static_cast<std::size_t>(c)];
    if (i == j) {
      n(i + j * m, c) = 1.0;
    } else {
      n(i + j * m, c) = w;
      n(j + i * m, c) = w;
    }
  }
  return n;
}

double symmetry_defect(const Matrix& a) {
  return (a - a.transpose()).norm();
}

double unitarity_defect(const Matrix& a) {
  return (a.adjoint() * a - Matrix::Identity(a.cols(), a.cols())).norm();
}

TakagiFactors takagi(const Matrix& a) {
  require_symmetric(a, "takagi");
  const Index m = a.rows();
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::BDCSVD<Matrix> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();

  TakagiFactors out;
  out.q.resize(m, m);
  out.sigma.resize(m);
  const double smax = m > 0 ? s(0) : 0.0;
  const double zero_tol = kZeroSingularRel * smax;

  Index start = 0;
  while (start < m) {
    if (s(start) <= zero_tol) {
      // Null space: conj(V_0) spans the left null space of a symmetric matrix.
      const Index count = m - start;
      out.q.middleCols(start, count) = v.middleCols(start, count).conjugate();
      out.sigma.segment(start, count).setZero();
      break;
    }
    Index end = start + 1;
    while (end < m && s(end) > zero_tol &&
           s(end - 1) - s(end) <= kClusterRel * smax) {
      ++end;
    }
    const Index count = end - start;
    const auto uc = u.middleCols(start, count);
    const Matrix block = uc.adjoint() * sym * uc.conjugate();
    Matrix qb;
    RealVector sb;
    takagi_cluster(block, qb, sb);
    out.q.middleCols(start, count) = uc * qb;
    out.sigma.segment(start, count) = sb;
    start = end;
  }
  return out;
}

Matrix expm_skew_hermitian(const Matrix& b) {
  require_square(b, "expm_skew_hermitian");
  if ((b + b.adjoint()).norm() > kSymmetryTol * std::max(1.0, b.norm())) {
    throw ContractViolation("expm_skew_hermitian: input is not skew-Hermitian");
  }
  const Matrix herm = Complex(0.0, -0.5) * (b - b.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
  const RealVector& lambda = eig.eigenvalues();
  Vector phases(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) phases(i) = std::polar(1.0, lambda(i));
  const Matrix& w = eig.eigenvectors();
  return w * phases.asDiagonal() * w.adjoint();
}

Matrix project_to_unitary(const Matrix& theta) {
  const TakagiFactors f = takagi(theta);
  return f.q * f.q.transpose();
}

Matrix project_to_unitary_svd(const Matrix& theta) {
  require_symmetric(theta, "project_to_unitary_svd");
  const Index m = theta.rows();
  Eigen::BDCSVD<Matrix> svd(theta, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double tol = m > 0 ? kZeroSingularRel * s(0) : 0.0;
  Index rank = 0;
  while (rank < m && s(rank) > tol) ++rank;
  Matrix left(m, m);
  left.leftCols(rank) = svd.matrixU().leftCols(rank);
  left.rightCols(m - rank) = svd.matrixV().rightCols(m - rank).conjugate();
  return left * svd.matrixV().adjoint();
}

Matrix complex_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

Matrix random_unitary(Index m, std::mt19937_64& rng) {
  if (m < 1) throw InvalidDimension("random_unitary: m must be >= 1");
  const Matrix g = complex_gaussian(m, m, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < m; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix random_unitary(Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_unitary(m, rng);
}

Matrix smallest_eigenvectors(const Matrix& hermitian, Index count) {
  require_square(hermitian, "smallest_eigenvectors");
  if (count > hermitian.rows()) {
    throw InvalidDimension("smallest_eigenvectors: count exceeds dimension");
  }
  const Matrix h = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  return eig.eigenvectors().leftCols(count);
}

}  // namespace bdris::linalg
