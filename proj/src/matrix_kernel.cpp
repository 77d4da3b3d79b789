#include "mpia/matrix_kernel.hpp"

#include <algorithm>
#include <cmath>

namespace mpia {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) return false;
  return true;
}

HermitianEig hermitian_eig(const HermitianPsd& q) {
  if (q.rows() != q.cols() || q.rows() == 0)
    throw DimensionError("hermitian_eig: expected a non-empty square matrix");
  if (!all_finite(q)) throw InputError("hermitian_eig: non-finite entries");

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(q, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw InputError("hermitian_eig: solver did not converge");

  HermitianEig out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) {
    auto col = out.eigenvectors.col(k);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      // strict comparison keeps the first entry on exact ties
      const double mag = std::abs(col(r));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (best > 0.0) col *= std::conj(col(arg)) / best;
    col(arg) = Complex(col(arg).real(), 0.0);
  }
  return out;
}

TruncatedUnitary nu_min(const HermitianPsd& q, int d, Rng& rng) {
  if (q.rows() != q.cols()) throw DimensionError("nu_min: matrix is not square");
  if (d < 1 || d > q.rows())
    throw DimensionError("nu_min: requested " + std::to_string(d) + " columns from a " +
                         std::to_string(q.rows()) + "-dimensional space");
  if (!all_finite(q)) throw InputError("nu_min: non-finite entries");
  if (q.norm() <= kZeroMatrixNorm) return random_truncated_unitary(static_cast<int>(q.rows()), d, rng);
  return hermitian_eig(q).eigenvectors.leftCols(d);
}

CMatrix random_gaussian_matrix(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw DimensionError("random_gaussian_matrix: dimensions must be positive");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  // row-major fill so the draw order matches the documented entry order
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = Complex(re, im);
    }
  return m;
}

TruncatedUnitary random_truncated_unitary(int n, int p, Rng& rng) {
  if (n < 1 || p < 1) throw DimensionError("random_truncated_unitary: dimensions must be positive");
  if (p > n) throw DimensionError("random_truncated_unitary: p > n");
  const CMatrix g = random_gaussian_matrix(n, p, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix x = qr.householderQ() * CMatrix::Identity(n, p);
  const CMatrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  // Rotate columns so diag(R) is real positive; this makes the factorization
  // unique and the resulting distribution exactly Haar.
  for (int k = 0; k < p; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) x.col(k) *= r(k, k) / mag;
  }
  return x;
}

CMatrix projected_outer(const CMatrix& a, const CMatrix& x) {
  const CMatrix ax = a * x;
  return ax * ax.adjoint();
}

double quadratic_trace(const CMatrix& q, const CMatrix& x) {
  return (x.adjoint() * q * x).trace().real();
}

double orthonormality_error(const CMatrix& x) {
  return (x.adjoint() * x - CMatrix::Identity(x.cols(), x.cols())).norm();
}

bool is_truncated_unitary(const CMatrix& x, double tol) {
  return x.cols() >= 1 && x.cols() <= x.rows() && all_finite(x) && orthonormality_error(x) <= tol;
}

bool is_hermitian_psd(const CMatrix& q, double herm_tol, double psd_tol) {
  if (q.rows() != q.cols() || q.rows() == 0 || !all_finite(q)) return false;
  const double scale = std::max(1.0, q.norm());
  if ((q - q.adjoint()).norm() > herm_tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(q), Eigen::EigenvaluesOnly);
  const RVector& ev = solver.eigenvalues();
  return ev(0) >= -psd_tol * std::max(1.0, ev(ev.size() - 1));
}

int numerical_rank(const HermitianPsd& q, double rel_tol) {
  const double scale = q.norm();
  if (scale <= kZeroMatrixNorm) return 0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(q), Eigen::EigenvaluesOnly);
  const RVector& ev = solver.eigenvalues();
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [&](double v) { return v > rel_tol * scale; }));
}

Rng derive_stream(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

}  // namespace mpia
