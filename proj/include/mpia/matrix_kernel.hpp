// Dense complex matrix primitives shared by the message-passing engine, the
// ILM reference and the metrics.
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mpia {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// n x p matrix with orthonormal columns (a point on the complex Stiefel manifold).
using TruncatedUnitary = CMatrix;
// Square Hermitian positive semidefinite matrix.
using HermitianPsd = CMatrix;

// Every random draw in the library goes through an explicitly passed stream.
using Rng = std::mt19937_64;

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

struct HermitianEig {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors; // column k pairs with eigenvalues(k)
};

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
/// Each eigenvector is rotated so that its largest-magnitude entry is real
/// and positive (first such entry on ties), which makes the basis
/// deterministic for a simple spectrum.
HermitianEig hermitian_eig(const HermitianPsd& q);

/// Frobenius norm below which a matrix counts as exactly zero for nu_min.
inline constexpr double kZeroMatrixNorm = 1e-12;

/// Orthonormal basis of the invariant subspace of the d weakest eigenvalues.
/// The zero matrix has no preferred subspace: a Haar-random truncated unitary
/// is drawn from rng instead. For any other input rng is not touched.
TruncatedUnitary nu_min(const HermitianPsd& q, int d, Rng& rng);

/// i.i.d. circularly symmetric complex Gaussian entries, unit variance.
CMatrix random_gaussian_matrix(int rows, int cols, Rng& rng);

/// Haar-distributed n x p truncated unitary.
TruncatedUnitary random_truncated_unitary(int n, int p, Rng& rng);

// (Q + Q^H) / 2
inline CMatrix hermitize(const CMatrix& q) { return (q + q.adjoint()) * 0.5; }

// A X X^H A^H, the covariance a subspace X induces through the map A.
CMatrix projected_outer(const CMatrix& a, const CMatrix& x);

// tr(X^H Q X), real part.
double quadratic_trace(const CMatrix& q, const CMatrix& x);

bool all_finite(const CMatrix& m);

// ||X^H X - I||_F
double orthonormality_error(const CMatrix& x);

bool is_truncated_unitary(const CMatrix& x, double tol = 1e-10);

/// Checks the HermitianPsd invariants: symmetry relative to max(1, ||Q||_F)
/// and smallest eigenvalue >= -psd_tol * max(1, largest eigenvalue).
bool is_hermitian_psd(const CMatrix& q, double herm_tol = 1e-10, double psd_tol = 1e-9);

/// Number of eigenvalues above rel_tol * max(||Q||_F, tiny).
int numerical_rank(const HermitianPsd& q, double rel_tol = 1e-9);

/// Rng seeded from a master seed plus a tuple of stream identifiers, so that
/// independent sub-streams can be derived without reordering effects.
Rng derive_stream(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mpia
