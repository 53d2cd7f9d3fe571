#pragma once

// Reference computations for the tests. Everything here is written directly
// from the definitions with Eigen's dense solvers and explicit inverses, and
// shares no code with the library's construction path.

#include "rforge/graph.hpp"
#include "rforge/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using rforge::Index;
using rforge::Matrix;
using rforge::Vector;

inline Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix inverse_sqrt(const Matrix& spd) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(spd);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

/// (X X^T)^{-1/2} X for a full-row-rank X.
inline Matrix whiten_columns(const Matrix& x) { return inverse_sqrt(x * x.transpose()) * x; }

/// Random isotropic frame of m vectors in R^n (m >= n).
inline Matrix random_isotropic(std::mt19937_64& rng, Index n, Index m) {
  return whiten_columns(gaussian(rng, n, m));
}

/// Erdos-Renyi style graph: each pair present with probability `density`,
/// weights uniform in [0.5, 2]. At least one edge.
inline rforge::WeightedGraph random_graph(Index n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<rforge::Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (uniform(rng, 0.0, 1.0) < density) edges.push_back({i, j, uniform(rng, 0.5, 2.0)});
  if (edges.empty()) edges.push_back({0, n - 1, 1.0});
  return rforge::WeightedGraph(n, edges);
}

inline Matrix laplacian(const rforge::WeightedGraph& g) {
  const Index n = g.vertex_count();
  Matrix l = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = g.weight(i, j);
      l(i, j) = -w;
      l(i, i) += w;
    }
  }
  return l;
}

/// Generalized Rayleigh quotient range of (lh, lg) on range(lg), computed by
/// projecting onto range(lg) and solving the reduced definite pencil with an
/// explicit Cholesky whitening.
inline std::pair<double, double> pencil_range(const Matrix& lh, const Matrix& lg) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(lg);
  const Vector& v = es.eigenvalues();
  const double tol = 1e-9 * v.cwiseAbs().maxCoeff();
  Index k = 0;
  while (k < v.size() && v(k) <= tol) ++k;
  const Index r = v.size() - k;
  const Matrix u = es.eigenvectors().rightCols(r);
  const Matrix w = v.tail(r).cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
  Matrix m = w * lh * w.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> em(m, Eigen::EigenvaluesOnly);
  return {em.eigenvalues().minCoeff(), em.eigenvalues().maxCoeff()};
}

/// One barrier step computed from definitions: potentials summed from Eigen
/// eigenvalues, resolvents by explicit inversion.
struct BssStep {
  double a = 0.0;
  double b = 0.0;
  Vector alpha;
  Vector beta;
  Index chosen = -1;
  double t = 0.0;
  Matrix next;
};

inline BssStep bss_step(const Matrix& a_prev, const Matrix& x, double eps, long i) {
  const double n = static_cast<double>(a_prev.rows());
  const double theta = (1.0 + eps) / (1.0 - eps);
  const double u_prev = theta * (n / eps + static_cast<double>(i - 1));
  const double u = theta * (n / eps + static_cast<double>(i));
  const double l_prev = -n / eps + static_cast<double>(i - 1);
  const double l = -n / eps + static_cast<double>(i);

  Eigen::SelfAdjointEigenSolver<Matrix> es(a_prev, Eigen::EigenvaluesOnly);
  const Vector& lam = es.eigenvalues();
  double phi_u_prev = 0, phi_u = 0, phi_l = 0, phi_l_prev = 0;
  for (Index k = 0; k < lam.size(); ++k) {
    phi_u_prev += 1.0 / (u_prev - lam(k));
    phi_u += 1.0 / (u - lam(k));
    phi_l += 1.0 / (lam(k) - l);
    phi_l_prev += 1.0 / (lam(k) - l_prev);
  }
  BssStep s;
  s.a = phi_u_prev - phi_u;
  s.b = phi_l - phi_l_prev;

  const Index dim = a_prev.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  const Matrix u_inv = (u * id - a_prev).inverse();
  const Matrix l_inv = (a_prev - l * id).inverse();
  const Matrix u_inv2 = u_inv * u_inv;
  const Matrix l_inv2 = l_inv * l_inv;
  const Index m = x.cols();
  s.alpha.resize(m);
  s.beta.resize(m);
  double best = 0.0;
  for (Index j = 0; j < m; ++j) {
    const Vector xj = x.col(j);
    s.alpha(j) = xj.dot(u_inv * xj) + xj.dot(u_inv2 * xj) / s.a;
    s.beta(j) = xj.dot(l_inv2 * xj) / s.b - xj.dot(l_inv * xj);
    if (!(s.alpha(j) > 0.0)) continue;
    const double margin = s.beta(j) - s.alpha(j);
    if (s.chosen < 0 || margin > best + 1e-12 * std::max(1.0, std::abs(best))) {
      best = margin;
      s.chosen = j;
    }
  }
  s.t = 1.0 / s.alpha(s.chosen);
  s.next = a_prev + s.t * x.col(s.chosen) * x.col(s.chosen).transpose();
  return s;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Random John decomposition in R^n from k generating vectors: w_i = A^{-1/2} u_i
/// with A = sum u_i u_i^T gives sum w_i w_i^T = I; points +-w_i/|w_i| with
/// weights |w_i|^2 / 2 each.
inline void random_john(std::mt19937_64& rng, Index n, Index k, Matrix& points, Vector& weights) {
  const Matrix w = whiten_columns(gaussian(rng, n, k));
  points.resize(n, 2 * k);
  weights.resize(2 * k);
  for (Index i = 0; i < k; ++i) {
    const double len = w.col(i).norm();
    points.col(2 * i) = w.col(i) / len;
    points.col(2 * i + 1) = -w.col(i) / len;
    weights(2 * i) = weights(2 * i + 1) = 0.5 * len * len;
  }
}

inline double l1(const Matrix& pts, Index i, Index j) {
  double s = 0.0;
  for (Index c = 0; c < pts.cols(); ++c) s += std::abs(pts(i, c) - pts(j, c));
  return s;
}

inline double lp_norm(const Vector& v, double p) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), p);
  return std::pow(s, 1.0 / p);
}

/// sum_i sum_j g_ij |x_i - x_j|^p over the dense adjacency matrix.
inline double p_energy(const rforge::WeightedGraph& g, const Vector& x, double p) {
  double s = 0.0;
  for (Index i = 0; i < g.vertex_count(); ++i)
    for (Index j = 0; j < g.vertex_count(); ++j)
      s += g.weight(i, j) * std::pow(std::abs(x(i) - x(j)), p);
  return s;
}

inline double min_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// T = Q1 diag(s) Q2^T with singular values uniform in [lo, 1].
inline Matrix operator_with_flat_spectrum(std::mt19937_64& rng, Index n, double lo) {
  Eigen::HouseholderQR<Matrix> q1(gaussian(rng, n, n));
  Eigen::HouseholderQR<Matrix> q2(gaussian(rng, n, n));
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = uniform(rng, lo, 1.0);
  s(0) = 1.0;
  const Matrix a = q1.householderQ() * Matrix::Identity(n, n);
  const Matrix b = q2.householderQ() * Matrix::Identity(n, n);
  return a * s.asDiagonal() * b.transpose();
}

}  // namespace oracle
