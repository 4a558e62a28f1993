#pragma once

// Joint coercivity of drift coefficients a and gradient-noise coefficients b:
// positivity of the quadratic form of a - (1/2) b b^T, in the scalar and the
// diagonal-system variants, plus a sampling oracle.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace critspace {

// Drift coefficients at one evaluation point: a d x d array of N x N blocks.
// The scalar case N=1 collapses to a d x d real matrix.
struct DiffusionCoeff {
  int d = 1;
  int N = 1;
  std::vector<Eigen::MatrixXd> blocks;  // row-major over (i,j), each N x N

  const Eigen::MatrixXd& block(int i, int j) const { return blocks[i * d + j]; }

  void validate() const {
    if (d < 1 || N < 1 || static_cast<int>(blocks.size()) != d * d)
      throw std::domain_error("DiffusionCoeff: inconsistent shape");
    for (const auto& m : blocks) {
      if (m.rows() != N || m.cols() != N)
        throw std::domain_error("DiffusionCoeff: block size mismatch");
      if (!m.allFinite()) throw std::domain_error("DiffusionCoeff: non-finite entry");
    }
  }
};

// Noise coefficients at one evaluation point: b[j][k][n] with square-summable
// n-slices (finite bank here).
struct NoiseCoeff {
  int d = 1;
  int N = 1;
  int nMax = 0;
  std::vector<double> b;  // index (j*N + k)*nMax + n

  double at(int j, int k, int n) const { return b[(j * N + k) * nMax + n]; }

  void validate() const {
    if (d < 1 || N < 1 || nMax < 0 ||
        static_cast<int>(b.size()) != d * N * nMax)
      throw std::domain_error("NoiseCoeff: inconsistent shape");
    for (double v : b)
      if (!std::isfinite(v)) throw std::domain_error("NoiseCoeff: non-finite entry");
  }

  // Off-diagonal noise coupling between components falls outside the
  // diagonal-system assumption; such banks must be declared with the
  // component index k built in, which this layout enforces by construction.
};

// Sigma_{ij}: diagonal N x N blocks with entries (1/2) sum_n b_{ikn} b_{jkn}.
inline DiffusionCoeff sigma_matrix(const NoiseCoeff& b) {
  b.validate();
  DiffusionCoeff sigma;
  sigma.d = b.d;
  sigma.N = b.N;
  sigma.blocks.assign(b.d * b.d, Eigen::MatrixXd::Zero(b.N, b.N));
  for (int i = 0; i < b.d; ++i)
    for (int j = 0; j < b.d; ++j) {
      Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(b.N, b.N);
      for (int k = 0; k < b.N; ++k) {
        double acc = 0.0;
        for (int n = 0; n < b.nMax; ++n) acc += b.at(i, k, n) * b.at(j, k, n);
        blk(k, k) = 0.5 * acc;
      }
      sigma.blocks[i * b.d + j] = blk;
    }
  return sigma;
}

namespace detail {

// Value of the form xi_i xi_j ((a-Sigma)_{ij} theta, theta).
inline double form_value(const DiffusionCoeff& c, const Eigen::VectorXd& xi,
                         const Eigen::VectorXd& theta) {
  double v = 0.0;
  for (int i = 0; i < c.d; ++i)
    for (int j = 0; j < c.d; ++j)
      v += xi(i) * xi(j) * theta.dot(c.block(i, j) * theta);
  return v;
}

inline DiffusionCoeff difference(const DiffusionCoeff& a, const DiffusionCoeff& sigma) {
  a.validate();
  DiffusionCoeff c = a;
  if (sigma.d != a.d || sigma.N != a.N)
    throw std::domain_error("coefficient shapes disagree");
  for (int idx = 0; idx < a.d * a.d; ++idx) c.blocks[idx] -= sigma.blocks[idx];
  return c;
}

// d x d matrix theta^T C_ij theta for fixed theta.
inline Eigen::MatrixXd contract_theta(const DiffusionCoeff& c, const Eigen::VectorXd& theta) {
  Eigen::MatrixXd m(c.d, c.d);
  for (int i = 0; i < c.d; ++i)
    for (int j = 0; j < c.d; ++j) m(i, j) = theta.dot(c.block(i, j) * theta);
  return 0.5 * (m + m.transpose());
}

// N x N matrix sum_ij xi_i xi_j C_ij for fixed xi.
inline Eigen::MatrixXd contract_xi(const DiffusionCoeff& c, const Eigen::VectorXd& xi) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(c.N, c.N);
  for (int i = 0; i < c.d; ++i)
    for (int j = 0; j < c.d; ++j) m += xi(i) * xi(j) * c.block(i, j);
  return 0.5 * (m + m.transpose());
}

inline double min_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

inline Eigen::VectorXd min_eigvec(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvectors().col(0);
}

}  // namespace detail

// Minimum over unit xi (and unit theta in the system case) of the quadratic
// form of a - Sigma.  Scalar case: exact smallest eigenvalue.  System case:
// alternating eigen-minimization in xi and theta with random restarts.
inline double ellipticity_margin(const DiffusionCoeff& a, const NoiseCoeff& b) {
  DiffusionCoeff c = detail::difference(a, sigma_matrix(b));
  if (c.N == 1) {
    Eigen::MatrixXd m(c.d, c.d);
    for (int i = 0; i < c.d; ++i)
      for (int j = 0; j < c.d; ++j) m(i, j) = c.block(i, j)(0, 0);
    return detail::min_eig(m);
  }
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss;
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 16; ++restart) {
    Eigen::VectorXd theta(c.N);
    for (int k = 0; k < c.N; ++k) theta(k) = gauss(rng);
    theta.normalize();
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
      Eigen::VectorXd xi = detail::min_eigvec(detail::contract_theta(c, theta));
      theta = detail::min_eigvec(detail::contract_xi(c, xi));
      double v = detail::form_value(c, xi, theta);
      if (std::abs(prev - v) < 1e-15) break;
      prev = v;
    }
    best = std::min(best, prev);
  }
  return best;
}

// Degenerate coercivity: xi^T (a - Sigma) xi >= delta xi^T a xi and a
// uniformly elliptic, scalar blocks only.
inline bool degenerate_check(const DiffusionCoeff& a, const NoiseCoeff& b, double delta) {
  if (a.N != 1) throw std::domain_error("degenerate_check: scalar coefficients only");
  DiffusionCoeff sigma = sigma_matrix(b);
  Eigen::MatrixXd ma(a.d, a.d), ms(a.d, a.d);
  a.validate();
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) {
      ma(i, j) = a.block(i, j)(0, 0);
      ms(i, j) = sigma.block(i, j)(0, 0);
    }
  double gap = detail::min_eig(ma - ms - delta * ma);
  double ell = detail::min_eig(ma);
  return gap >= -1e-14 && ell > 0.0;
}

// Sampling oracle: coarse quasi-uniform direction sweep followed by local
// polish, so that >= 1e4 samples resolve the margin to ~1e-9 in d <= 3.
inline double brute_force_margin(const DiffusionCoeff& a, const NoiseCoeff& b,
                                 int nSamples) {
  DiffusionCoeff c = detail::difference(a, sigma_matrix(b));
  if (nSamples < 1) throw std::domain_error("brute_force_margin: need samples");

  auto eval_xi = [&](const Eigen::VectorXd& xi) {
    if (c.N == 1) {
      Eigen::VectorXd theta = Eigen::VectorXd::Ones(1);
      return detail::form_value(c, xi, theta);
    }
    return detail::min_eig(detail::contract_xi(c, xi));
  };

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd bestXi;
  if (c.d == 1) {
    Eigen::VectorXd xi = Eigen::VectorXd::Ones(1);
    best = eval_xi(xi);
    bestXi = xi;
  } else if (c.d == 2) {
    for (int i = 0; i < nSamples; ++i) {
      double ang = M_PI * i / nSamples;  // antipodal directions are equivalent
      Eigen::VectorXd xi(2);
      xi << std::cos(ang), std::sin(ang);
      double v = eval_xi(xi);
      if (v < best) { best = v; bestXi = xi; }
    }
  } else {
    // Fibonacci sphere in d=3 (and a random sweep beyond).
    std::mt19937_64 rng(0x51a9b2c3d4e5f607ull);
    std::normal_distribution<double> gauss;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < nSamples; ++i) {
      Eigen::VectorXd xi(c.d);
      if (c.d == 3) {
        double z = 1.0 - 2.0 * (i + 0.5) / nSamples;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double ang = golden * i;
        xi << r * std::cos(ang), r * std::sin(ang), z;
      } else {
        for (int k = 0; k < c.d; ++k) xi(k) = gauss(rng);
        xi.normalize();
      }
      double v = eval_xi(xi);
      if (v < best) { best = v; bestXi = xi; }
    }
  }

  // Local polish: Nelder-Mead-style coordinate shrink around the best point.
  if (c.d > 1) {
    double step = 4.0 / std::sqrt(static_cast<double>(nSamples));
    for (int round = 0; round < 60; ++round) {
      bool improved = false;
      for (int k = 0; k < c.d; ++k) {
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd xi = bestXi;
          xi(k) += sgn * step;
          xi.normalize();
          double v = eval_xi(xi);
          if (v < best) { best = v; bestXi = xi; improved = true; }
        }
      }
      if (!improved) step *= 0.5;
      if (step < 1e-12) break;
    }
  }
  return best;
}

}  // namespace critspace
