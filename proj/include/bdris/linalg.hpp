#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bdris/types.hpp"

namespace bdris::linalg {

/// Factors of a complex symmetric matrix a = q * diag(sigma) * q^T.
struct TakagiFactors {
  Matrix q;
  RealVector sigma;  // non-increasing
};

/// (row, col) pair with row <= col; one per column of the symmetric basis.
struct SymmetricIndexPair {
  Index row;
  Index col;
};

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& a);
Matrix unvec(const Vector& r, Index rows);

/// m^2 x m^2 permutation with P * vec(A) = vec(A^T).
Matrix commutation_matrix(Index m);

/// Index pairs (i <= j) in the column order used by symmetric_nullspace_basis.
std::vector<SymmetricIndexPair> symmetric_index_pairs(Index m);

/// Orthonormal basis of the null space of (I - P), built from index pairs.
/// Column (i,i) is e_ii; column (i<j) is (e_ij + e_ji)/sqrt(2).
Matrix symmetric_nullspace_basis(Index m);

double symmetry_defect(const Matrix& a);
double unitarity_defect(const Matrix& a);

/// Takagi factorization via SVD with per-cluster phase correction.
/// Throws ContractViolation if a is not symmetric to kSymmetryTol.
TakagiFactors takagi(const Matrix& a);

/// exp(b) for skew-Hermitian b via the Hermitian eigendecomposition of -i*b.
Matrix expm_skew_hermitian(const Matrix& b);

/// Closest symmetric unitary matrix, computed as Q*Q^T from takagi().
Matrix project_to_unitary(const Matrix& theta);

/// Same projection through the SVD partition [U_d, conj(V_{M-d})] V^H.
Matrix project_to_unitary_svd(const Matrix& theta);

/// Complex Gaussian matrix with i.i.d. CN(0,1) entries.
Matrix complex_gaussian(Index rows, Index cols, std::mt19937_64& rng);

/// Haar-like unitary: QR of a complex Gaussian with phase-normalized diag(R).
Matrix random_unitary(Index m, std::mt19937_64& rng);
Matrix random_unitary(Index m, std::uint64_t seed);

/// Orthonormal eigenvectors of a Hermitian matrix for its `count` smallest
/// eigenvalues.
Matrix smallest_eigenvectors(const Matrix& hermitian, Index count);

}  // namespace bdris::linalg
