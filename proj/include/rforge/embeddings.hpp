#pragma once

// Constructions built on frame sparsification: approximate John
// decompositions, l1 dimension reduction through cut decompositions, and
// subspace embeddings for even p through monomial lifts.

#include "rforge/bss.hpp"
#include "rforge/linalg.hpp"

#include <vector>

namespace rforge {

/// Unit vectors x_i (columns of `points`) with weights c_i > 0 such that
/// sum c_i x_i x_i^T = I and sum c_i x_i = 0.
struct JohnDecomposition {
  Matrix points;  // n x m
  Vector weights; // m

  Index dim() const noexcept { return points.rows(); }
  Index size() const noexcept { return points.cols(); }

  /// Max-entry deviation of sum c_i x_i x_i^T from I.
  double identity_residual() const;
  /// sum c_i x_i, accumulated in column order.
  Vector center_of_mass() const;
  /// Throws ValidationError naming the violated residual (identity 1e-8,
  /// center of mass 1e-8, unit norms 1e-10, positive weights).
  void validate() const;
};

struct JohnApproximation {
  /// Output decomposition; columns come in pairs (z_i, -z_i) with equal weights.
  JohnDecomposition decomposition;
  std::vector<Index> support;  // source indices J, ascending
  double eps = 0.0;
  double eps0 = 0.0;           // frame sparsification parameter
  long support_bound = 0;      // ceil(n / eps0^2)
  double a_deviation = 0.0;    // ||A - I|| for A = sum s_i c_i x_i x_i^T, <= eps/4
  SparsifyResult frame;
};

/// Replaces a John decomposition by one supported on O(n/eps^2) of its points
/// (after re-normalization by A^{-1/2}). Throws ValidationError when the input
/// is not a John decomposition, CertificationFailure when the output fails its
/// own identity check.
JohnApproximation approximate_john(const JohnDecomposition& jd, double eps);

struct Cut {
  std::vector<Index> members;  // ascending
  double weight = 0.0;
};

/// The l1 metric of a finite point set written as sum_E w_E |1_E(i) - 1_E(j)|.
struct CutDecomposition {
  Index n = 0;
  std::vector<Cut> cuts;

  /// sum over cuts separating i and j.
  double distance(Index i, Index j) const;
};

/// Threshold cuts per coordinate, stored as the side without point 0 and merged
/// when those subsets coincide.
/// `points` holds one point per row. Throws ArgumentError for fewer than two points.
CutDecomposition cut_decompose(const Matrix& points);

struct L1Embedding {
  Matrix points;                // n x k, one embedded point per row
  CutDecomposition cuts;
  std::vector<Index> selected;  // indices into cuts.cuts
  Vector cut_scale;             // normalized s_E for the selected cuts
  double eps = 0.0;
  double eps0 = 0.0;
  long dimension_bound = 0;     // ceil(n / eps0^2)
  double min_distortion = 1.0;  // over pairs at positive distance
  double max_distortion = 1.0;
  SparsifyResult frame;

  Index target_dim() const noexcept { return points.cols(); }
};

/// Embeds points (rows) of l1^d into l1^k with every pairwise distance ratio in
/// [1, 1 + eps]. Throws CertificationFailure when a measured ratio leaves
/// [1 - 1e-8, 1 + eps + 1e-8].
L1Embedding embed_l1(const Matrix& points, double eps);

/// l1 distance between two rows.
double l1_distance(const Matrix& points, Index i, Index j);

struct LpEmbedding {
  int p = 0;
  Index n = 0;                  // dimension of X
  Index m = 0;                  // ambient coordinates
  Index d = 0;                  // dimension of the monomial span Y
  long d_bound = 0;             // binomial(n + p/2 - 1, p/2)
  Matrix y_basis;               // m x d, orthonormal basis of Y
  std::vector<Index> selected;  // coordinates i in sigma, ascending
  Vector weights;               // normalized s_i for the selected coordinates
  Vector coordinate_scale;      // s_i^{1/p}
  double eps = 0.0;
  double eps0 = 0.0;
  long support_bound = 0;       // ceil(d / eps0^2)
  double ratio_bound = 0.0;     // 1 + eps p / 4
  double certified_min = 0.0;   // spectrum of sum_{sigma} s_i x_i x_i^T on Y
  double certified_max = 0.0;
  SparsifyResult frame;

  /// x -> (s_i^{1/p} x_i)_{i in sigma} for x in R^m.
  Vector map(const Vector& x) const;
  /// ||map(x)||_p / ||x||_p.
  double distortion(const Vector& x) const;
};

/// Coordinate-selection embedding of X = span(basis) (one basis vector per
/// row, n x m) in l_p^m into l_p^{|sigma|}. Throws ArgumentError when p is odd
/// or below 4 and ValidationError when the basis is rank deficient.
LpEmbedding embed_lp_even(const Matrix& basis, int p, double eps);

/// binomial(n + k - 1, k), the number of multisets of size k from n symbols.
long multiset_count(long n, long k);

/// Orthonormal basis of the column span of `columns` by Gram-Schmidt with
/// column pivoting; columns whose residual norm is at most
/// tol_scale * machine_eps * max column norm are dropped (tol_scale <= 0 uses
/// the column count).
Matrix pivoted_orthonormal_basis(const Matrix& columns, double tol_scale = -1.0);

}  // namespace rforge
