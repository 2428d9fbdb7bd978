#include "slv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slv {

namespace {

constexpr double kEps = 2.22e-16;

double sign_of(double magnitude, double carrier) {
  return carrier >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Gaussian similarity reduction to upper Hessenberg form with pivoting.
void hessenberg(std::vector<double>& data, int n) {
  auto a = [&](int i, int j) -> double& { return data[static_cast<std::size_t>(i) * n + j]; };
  for (int m = 1; m < n - 1; ++m) {
    double x = 0.0;
    int pivot = m;
    for (int i = m; i < n; ++i) {
      if (std::abs(a(i, m - 1)) > std::abs(x)) {
        x = a(i, m - 1);
        pivot = i;
      }
    }
    if (pivot != m) {
      for (int j = m - 1; j < n; ++j) std::swap(a(pivot, j), a(m, j));
      for (int j = 0; j < n; ++j) std::swap(a(j, pivot), a(j, m));
    }
    if (x != 0.0) {
      for (int i = m + 1; i < n; ++i) {
        double y = a(i, m - 1);
        if (y != 0.0) {
          y /= x;
          a(i, m - 1) = 0.0;
          for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
          for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
      }
    }
  }
  for (int i = 2; i < n; ++i) {
    for (int j = 0; j <= i - 2; ++j) a(i, j) = 0.0;
  }
}

}  // namespace

// Shifted QR iteration on the Hessenberg form, eigenvalues only.
std::vector<std::complex<double>> eigenvalues(std::vector<double> data, int n) {
  if (n <= 0) return {};
  if (static_cast<int>(data.size()) != n * n) {
    throw std::invalid_argument("eigenvalues: matrix size mismatch");
  }
  if (n == 1) return {{data[0], 0.0}};

  hessenberg(data, n);
  auto a = [&](int i, int j) -> double& { return data[static_cast<std::size_t>(i) * n + j]; };

  std::vector<std::complex<double>> eig(static_cast<std::size_t>(n));
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  }

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = a(nn, nn);
      if (l == nn) {
        eig[static_cast<std::size_t>(nn--)] = {x + t, 0.0};
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            double r1 = x + z;
            double r2 = (z != 0.0) ? x - w / z : r1;
            eig[static_cast<std::size_t>(nn - 1)] = {r1, 0.0};
            eig[static_cast<std::size_t>(nn)] = {r2, 0.0};
          } else {
            eig[static_cast<std::size_t>(nn - 1)] = {x + p, z};
            eig[static_cast<std::size_t>(nn)] = {x + p, -z};
          }
          nn -= 2;
        } else {
          if (its == 40) throw std::runtime_error("eigenvalues: QR iteration stalled");
          if (its == 10 || its == 20 || its == 30) {
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0;
          for (m = nn - 2; m >= l; --m) {
            double z = a(m, m);
            double rr = x - z;
            double ss = y - z;
            p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - rr - ss;
            r = a(m + 2, m + 1);
            double scale = std::abs(p) + std::abs(q) + std::abs(r);
            p /= scale;
            q /= scale;
            r /= scale;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            double z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              double pp = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                pp += r * a(k + 2, j);
                a(k + 2, j) -= pp * z;
              }
              a(k + 1, j) -= pp * y;
              a(k, j) -= pp * x;
            }
            const int mmin = std::min(nn, k + 3);
            for (int i = l; i <= mmin; ++i) {
              double pp = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                pp += z * a(i, k + 2);
                a(i, k + 2) -= pp * r;
              }
              a(i, k + 1) -= pp * q;
              a(i, k) -= pp;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return eig;
}

int Svd::rank(double tol) const {
  if (sigma.empty() || sigma.front() <= 0.0) return 0;
  int r = 0;
  for (double s : sigma) {
    if (s > tol * sigma.front()) ++r;
  }
  return r;
}

Svd svd(std::vector<double> data, int n) {
  if (static_cast<int>(data.size()) != n * n) {
    throw std::invalid_argument("svd: matrix size mismatch");
  }
  Svd out;
  out.n = n;
  out.v.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) out.v[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto a = [&](int i, int j) -> double& { return data[static_cast<std::size_t>(i) * n + j]; };
  auto v = [&](int i, int j) -> double& { return out.v[static_cast<std::size_t>(i) * n + j]; };

  // One-sided Jacobi: rotate column pairs until all are mutually orthogonal.
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < n; ++i) {
          app += a(i, p) * a(i, p);
          aqq += a(i, q) * a(i, q);
          apq += a(i, p) * a(i, q);
        }
        if (std::abs(apq) <= 1e-30 + 1e-15 * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double tt = sign_of(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + tt * tt);
        const double s = c * tt;
        for (int i = 0; i < n; ++i) {
          const double tp = a(i, p), tq = a(i, q);
          a(i, p) = c * tp - s * tq;
          a(i, q) = s * tp + c * tq;
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  out.sigma.resize(static_cast<std::size_t>(n));
  out.u.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += a(i, j) * a(i, j);
    out.sigma[static_cast<std::size_t>(j)] = std::sqrt(norm);
    order[static_cast<std::size_t>(j)] = j;
  }
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return out.sigma[static_cast<std::size_t>(lhs)] > out.sigma[static_cast<std::size_t>(rhs)];
  });

  Svd sorted;
  sorted.n = n;
  sorted.sigma.resize(static_cast<std::size_t>(n));
  sorted.u.assign(static_cast<std::size_t>(n) * n, 0.0);
  sorted.v.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int jj = 0; jj < n; ++jj) {
    const int j = order[static_cast<std::size_t>(jj)];
    const double s = out.sigma[static_cast<std::size_t>(j)];
    sorted.sigma[static_cast<std::size_t>(jj)] = s;
    for (int i = 0; i < n; ++i) {
      sorted.v[static_cast<std::size_t>(i) * n + jj] = v(i, j);
      sorted.u[static_cast<std::size_t>(i) * n + jj] = s > 0.0 ? a(i, j) / s : 0.0;
    }
  }
  return sorted;
}

LeastSquares solve_min_norm(const std::vector<double>& a, int n, const std::vector<double>& b,
                            double rank_tol) {
  const Svd dec = svd(a, n);
  LeastSquares out;
  out.rank = dec.rank(rank_tol);
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < out.rank; ++j) {
    double coef = 0.0;
    for (int i = 0; i < n; ++i) coef += dec.u[static_cast<std::size_t>(i) * n + j] * b[static_cast<std::size_t>(i)];
    coef /= dec.sigma[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      out.x[static_cast<std::size_t>(i)] += dec.v[static_cast<std::size_t>(i) * n + j] * coef;
    }
  }
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = -b[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) row += a[static_cast<std::size_t>(i) * n + j] * out.x[static_cast<std::size_t>(j)];
    res += row * row;
  }
  out.residual = std::sqrt(res);
  for (int j = out.rank; j < n; ++j) {
    std::vector<double> dir(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dir[static_cast<std::size_t>(i)] = dec.v[static_cast<std::size_t>(i) * n + j];
    out.nullspace.push_back(std::move(dir));
  }
  return out;
}

}  // namespace slv
