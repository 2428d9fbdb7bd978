#ifndef SLV_LINALG_HPP
#define SLV_LINALG_HPP

#include <complex>
#include <vector>

// Dense helpers for the small (n <= 10) systems handled here.

namespace slv {

// Eigenvalues of a real square matrix (row-major) via Hessenberg reduction
// followed by the shifted QR iteration.
std::vector<std::complex<double>> eigenvalues(std::vector<double> a, int n);

// Thin SVD of a square matrix by one-sided Jacobi rotations.
struct Svd {
  int n = 0;
  std::vector<double> u;       // n x n, columns for sigma > 0
  std::vector<double> v;       // n x n
  std::vector<double> sigma;   // descending
  int rank(double tol) const;  // count of sigma > tol * sigma.front()
};

Svd svd(std::vector<double> a, int n);

// Minimum-norm least-squares solution via the SVD, plus the residual norm.
struct LeastSquares {
  std::vector<double> x;
  double residual = 0.0;
  int rank = 0;
  std::vector<std::vector<double>> nullspace;
};

LeastSquares solve_min_norm(const std::vector<double>& a, int n, const std::vector<double>& b,
                            double rank_tol);

}  // namespace slv

#endif
