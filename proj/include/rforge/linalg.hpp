#pragma once

// Dense symmetric linear algebra kernel shared by every construction in the
// library: eigendecomposition, positive-definite resolvent solves and the
// rank-one update identities.

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <utility>

namespace rforge {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense real symmetric matrix. Storage is always exactly symmetric.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Index order);

  static SymmetricMatrix zero(Index order) { return SymmetricMatrix(order); }
  static SymmetricMatrix identity(Index order);
  static SymmetricMatrix diagonal(const Vector& diag);

  /// Accepts a square matrix that is symmetric up to `tol * (1 + max|m_ij|)`
  /// and stores the exact average of m and its transpose.
  static SymmetricMatrix from_dense(const Matrix& m, double tol = 1e-12);

  /// Sum of x_j x_j^T over the columns of `vectors`.
  static SymmetricMatrix gram_of_columns(const Matrix& vectors);

  Index order() const noexcept { return data_.rows(); }
  double operator()(Index i, Index j) const { return data_(i, j); }
  const Matrix& dense() const noexcept { return data_; }

  /// Returns this + t * x x^T (upper triangle computed, then mirrored).
  SymmetricMatrix plus_rank_one(double t, const Vector& x) const;
  SymmetricMatrix shifted(double shift) const;  // this + shift * I
  SymmetricMatrix scaled(double factor) const;

  double max_abs() const;
  double trace() const { return data_.trace(); }

 private:
  explicit SymmetricMatrix(Matrix data) : data_(std::move(data)) {}
  Matrix data_;
};

/// Eigenpairs sorted by descending eigenvalue; vectors are columns.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;

  Index order() const noexcept { return values.size(); }
  double largest() const { return values(0); }
  double smallest() const { return values(values.size() - 1); }

  /// Sum of lambda_k v_k v_k^T.
  Matrix reconstruct() const;
};

/// Householder tridiagonalization followed by implicit-shift QL.
/// Throws ConvergenceError after 50 * order QL iterations.
EigenDecomposition eigh(const SymmetricMatrix& m);

/// Ordered list of m vectors in R^n, stored as the columns of an n x m matrix.
class Frame {
 public:
  Frame(Index ambient_dim, Matrix vectors);
  explicit Frame(Matrix vectors);

  /// Builds a frame and certifies sum x_i x_i^T = I to `tol` in max-entry norm.
  /// Throws ValidationError with the observed residual otherwise.
  static Frame certified(Matrix vectors, double tol = 1e-8);

  /// Standard basis e_1, ..., e_n (isotropic by construction).
  static Frame standard_basis(Index n);

  Index ambient_dim() const noexcept { return vectors_.rows(); }
  Index size() const noexcept { return vectors_.cols(); }
  bool isotropy_certified() const noexcept { return certified_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  auto vector(Index j) const { return vectors_.col(j); }

  SymmetricMatrix outer_product_sum() const;
  /// Max-entry deviation of sum x_i x_i^T from I.
  double isotropy_residual() const;

 private:
  Matrix vectors_;
  bool certified_ = false;
};

/// Lower-triangular Cholesky factor of a positive-definite matrix, reused for
/// many right-hand sides. Throws FactorizationError on a nonpositive pivot.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& spd);

  Index order() const noexcept { return lower_.rows(); }
  double smallest_pivot() const noexcept { return smallest_pivot_; }

  /// Solves S X = B column by column. Columns are processed in independent
  /// fixed-size blocks, so the result does not depend on the thread count.
  Matrix solve(const Matrix& rhs) const;
  void solve_in_place(Eigen::Ref<Vector> x) const;

 private:
  Matrix lower_;
  double smallest_pivot_ = 0.0;
};

enum class ResolventSide {
  kUpper,  // (shift I - M)^{-1}
  kLower,  // (M - shift I)^{-1}
};

/// Applies the barrier resolvent to every column of `rhs`.
Matrix resolvent_apply(const SymmetricMatrix& m, double shift, ResolventSide side,
                       const Matrix& rhs);

/// (M + z z^T)^{-1} from M^{-1}. Throws SingularUpdateError when
/// |1 + <M^{-1} z, z>| < 1e-12.
SymmetricMatrix sherman_morrison_inverse_update(const SymmetricMatrix& m_inv,
                                                const Vector& z);

/// tr((M + z z^T)^{-1}) = tr(M^{-1}) - <M^{-2} z, z> / (1 + <M^{-1} z, z>).
double trace_after_rank_one(double m_inv_trace, const Vector& m_inv_z,
                            double m_inv2_z_dot_z, const Vector& z);

/// Coordinates on the range of A = sum x_i x_i^T. With A = V L V^T restricted
/// to the retained eigenpairs, whiten(x) = L^{-1/2} V^T x,
/// to_reduced(w) = L^{1/2} V^T w, and from_reduced inverts to_reduced on the
/// range, so <x, w> = <whiten(x), to_reduced(w)> for w in the range.
class ReductionMap {
 public:
  ReductionMap(Matrix basis, Vector eigenvalues);

  Index ambient_dim() const noexcept { return basis_.rows(); }
  Index rank() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }

  Matrix whiten(const Matrix& x) const;
  Matrix to_reduced(const Matrix& w) const;
  Matrix from_reduced(const Matrix& v) const;
  /// Matrix of whiten(), r x n.
  Matrix whitening_operator() const;
  /// Matrix B with x = B whiten(x) on the range, n x r.
  Matrix unwhitening_operator() const;

 private:
  Matrix basis_;
  Vector eigenvalues_;
};

struct IsotropicReduction {
  Frame frame;
  ReductionMap map;
};

/// Default relative rank tolerance for an n-dimensional frame.
inline double default_rank_tolerance(Index n) {
  return static_cast<double>(n) * std::numeric_limits<double>::epsilon();
}

/// Restricts the frame to the range of sum x_i x_i^T (eigenvalues below
/// rank_tol * lambda_1 are discarded) and whitens it. rank_tol < 0 selects
/// default_rank_tolerance.
IsotropicReduction isotropic_reduce(const Frame& frame, double rank_tol = -1.0);

/// Spectral norm of a general matrix, via eigh of its smaller Gram matrix.
double operator_norm(const Matrix& t);

}  // namespace rforge
