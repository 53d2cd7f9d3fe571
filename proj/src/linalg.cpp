#include "rforge/linalg.hpp"

#include "rforge/error.hpp"
#include "rforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace rforge {

// ---------------------------------------------------------------------------
// SymmetricMatrix

SymmetricMatrix::SymmetricMatrix(Index order) : data_(Matrix::Zero(order, order)) {
  if (order < 1) throw ArgumentError("SymmetricMatrix: order must be >= 1");
}

SymmetricMatrix SymmetricMatrix::identity(Index order) {
  SymmetricMatrix s(order);
  s.data_.diagonal().setOnes();
  return s;
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& diag) {
  SymmetricMatrix s(diag.size());
  s.data_.diagonal() = diag;
  return s;
}

SymmetricMatrix SymmetricMatrix::from_dense(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ValidationError("SymmetricMatrix: matrix must be square and nonempty");
  if (!m.allFinite()) throw ValidationError("SymmetricMatrix: non-finite entry");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    std::ostringstream os;
    os << "SymmetricMatrix: asymmetry " << asym << " exceeds tolerance";
    throw ValidationError(os.str());
  }
  Matrix sym(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i <= j; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      sym(i, j) = v;
      sym(j, i) = v;
    }
  return SymmetricMatrix(std::move(sym));
}

SymmetricMatrix SymmetricMatrix::gram_of_columns(const Matrix& vectors) {
  const Index n = vectors.rows();
  Matrix g = Matrix::Zero(n, n);
  g.selfadjointView<Eigen::Upper>().rankUpdate(vectors);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) g(i, j) = g(j, i);
  return SymmetricMatrix(std::move(g));
}

SymmetricMatrix SymmetricMatrix::plus_rank_one(double t, const Vector& x) const {
  if (x.size() != order()) throw ArgumentError("plus_rank_one: dimension mismatch");
  Matrix out = data_;
  for (Index j = 0; j < order(); ++j) {
    const double tx = t * x(j);
    for (Index i = 0; i <= j; ++i) out(i, j) += tx * x(i);
    for (Index i = 0; i < j; ++i) out(j, i) = out(i, j);
  }
  return SymmetricMatrix(std::move(out));
}

SymmetricMatrix SymmetricMatrix::shifted(double shift) const {
  Matrix out = data_;
  out.diagonal().array() += shift;
  return SymmetricMatrix(std::move(out));
}

SymmetricMatrix SymmetricMatrix::scaled(double factor) const {
  return SymmetricMatrix(Matrix(data_ * factor));
}

double SymmetricMatrix::max_abs() const { return data_.cwiseAbs().maxCoeff(); }

Matrix EigenDecomposition::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.transpose();
}

// ---------------------------------------------------------------------------
// eigh: Householder reduction to tridiagonal form, then QL with implicit
// Wilkinson-type shifts on the tridiagonal, accumulating the rotations.

namespace {

void tridiagonalize(Matrix& v, Vector& d, Vector& e) {
  const Index n = v.rows();
  for (Index j = 0; j < n; ++j) d(j) = v(n - 1, j);

  for (Index i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (Index k = 0; k < i; ++k) scale += std::abs(d(k));
    if (scale == 0.0) {
      e(i) = d(i - 1);
      for (Index j = 0; j < i; ++j) {
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (Index k = 0; k < i; ++k) {
        d(k) /= scale;
        h += d(k) * d(k);
      }
      double f = d(i - 1);
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e(i) = scale * g;
      h -= f * g;
      d(i - 1) = f - g;
      for (Index j = 0; j < i; ++j) e(j) = 0.0;

      for (Index j = 0; j < i; ++j) {
        f = d(j);
        v(j, i) = f;
        g = e(j) + v(j, j) * f;
        for (Index k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d(k);
          e(k) += v(k, j) * f;
        }
        e(j) = g;
      }
      f = 0.0;
      for (Index j = 0; j < i; ++j) {
        e(j) /= h;
        f += e(j) * d(j);
      }
      const double hh = f / (h + h);
      for (Index j = 0; j < i; ++j) e(j) -= hh * d(j);
      for (Index j = 0; j < i; ++j) {
        f = d(j);
        g = e(j);
        for (Index k = j; k <= i - 1; ++k) v(k, j) -= (f * e(k) + g * d(k));
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d(i) = h;
  }

  // Accumulate the Householder transformations.
  for (Index i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d(i + 1);
    if (h != 0.0) {
      for (Index k = 0; k <= i; ++k) d(k) = v(k, i + 1) / h;
      for (Index j = 0; j <= i; ++j) {
        double g = 0.0;
        for (Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (Index k = 0; k <= i; ++k) v(k, j) -= g * d(k);
      }
    }
    for (Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (Index j = 0; j < n; ++j) {
    d(j) = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e(0) = 0.0;
}

void tridiagonal_ql(Matrix& v, Vector& d, Vector& e) {
  const Index n = v.rows();
  for (Index i = 1; i < n; ++i) e(i - 1) = e(i);
  e(n - 1) = 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  const long cap = 50 * static_cast<long>(n);
  long iterations = 0;
  double f = 0.0;
  double tst1 = 0.0;

  for (Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
    Index m = l;
    while (m < n) {
      if (std::abs(e(m)) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      do {
        if (++iterations > cap) {
          std::ostringstream os;
          os << "eigh: no convergence after " << cap << " QL iterations (order " << n
             << ", off-diagonal residual " << e.cwiseAbs().maxCoeff() << ")";
          throw ConvergenceError(os.str(), static_cast<long>(n), e.cwiseAbs().maxCoeff());
        }
        double g = d(l);
        double p = (d(l + 1) - g) / (2.0 * e(l));
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d(l) = e(l) / (p + r);
        d(l + 1) = e(l) * (p + r);
        const double dl1 = d(l + 1);
        double h = g - d(l);
        for (Index i = l + 2; i < n; ++i) d(i) -= h;
        f += h;

        p = d(m);
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e(l + 1);
        double s = 0.0, s2 = 0.0;
        for (Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e(i);
          h = c * p;
          r = std::hypot(p, e(i));
          e(i + 1) = s * r;
          s = e(i) / r;
          c = p / r;
          p = c * d(i) - s * g;
          d(i + 1) = h + s * (c * g + s * d(i));
          for (Index k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e(l) / dl1;
        e(l) = s * p;
        d(l) = c * p;
      } while (std::abs(e(l)) > eps * tst1);
    }
    d(l) += f;
    e(l) = 0.0;
  }
}

}  // namespace

EigenDecomposition eigh(const SymmetricMatrix& m) {
  const Index n = m.order();
  Matrix v = m.dense();
  Vector d(n), e(n);
  tridiagonalize(v, d, e);
  tridiagonal_ql(v, d, e);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return d(a) > d(b); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = d(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frame

Frame::Frame(Index ambient_dim, Matrix vectors) : vectors_(std::move(vectors)) {
  if (ambient_dim < 1) throw ValidationError("Frame: ambient dimension must be >= 1");
  if (vectors_.rows() != ambient_dim)
    throw ValidationError("Frame: vector length does not match ambient dimension");
  if (!vectors_.allFinite()) throw ValidationError("Frame: non-finite entry");
}

Frame::Frame(Matrix vectors) : vectors_(std::move(vectors)) {
  if (vectors_.rows() < 1) throw ValidationError("Frame: ambient dimension must be >= 1");
  if (!vectors_.allFinite()) throw ValidationError("Frame: non-finite entry");
}

Frame Frame::certified(Matrix vectors, double tol) {
  Frame f(std::move(vectors));
  const double residual = f.isotropy_residual();
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "Frame: sum of outer products deviates from identity by " << residual
       << " (tolerance " << tol << ")";
    throw ValidationError(os.str());
  }
  f.certified_ = true;
  return f;
}

Frame Frame::standard_basis(Index n) { return certified(Matrix::Identity(n, n)); }

SymmetricMatrix Frame::outer_product_sum() const {
  return SymmetricMatrix::gram_of_columns(vectors_);
}

double Frame::isotropy_residual() const {
  const Matrix diff =
      outer_product_sum().dense() - Matrix::Identity(ambient_dim(), ambient_dim());
  return diff.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Cholesky and resolvents

CholeskyFactor::CholeskyFactor(const Matrix& spd) : lower_(Matrix::Zero(spd.rows(), spd.cols())) {
  const Index n = spd.rows();
  if (n != spd.cols() || n < 1) throw ArgumentError("CholeskyFactor: matrix must be square");
  const double floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
      spd.diagonal().cwiseAbs().maxCoeff();
  smallest_pivot_ = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) {
    double pivot = spd(j, j);
    for (Index k = 0; k < j; ++k) pivot -= lower_(j, k) * lower_(j, k);
    smallest_pivot_ = std::min(smallest_pivot_, pivot);
    if (!(pivot > floor)) {
      std::ostringstream os;
      os << "Cholesky: matrix is not positive definite (pivot " << pivot << " at index " << j
         << ")";
      throw FactorizationError(os.str(), smallest_pivot_);
    }
    const double ljj = std::sqrt(pivot);
    lower_(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = spd(i, j);
      for (Index k = 0; k < j; ++k) s -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = s / ljj;
    }
  }
}

void CholeskyFactor::solve_in_place(Eigen::Ref<Vector> x) const {
  const Index n = order();
  // L y = b, column-oriented
  for (Index k = 0; k < n; ++k) {
    const double yk = x(k) / lower_(k, k);
    x(k) = yk;
    for (Index i = k + 1; i < n; ++i) x(i) -= lower_(i, k) * yk;
  }
  // L^T x = y
  for (Index i = n - 1; i >= 0; --i) {
    double s = x(i);
    for (Index k = i + 1; k < n; ++k) s -= lower_(k, i) * x(k);
    x(i) = s / lower_(i, i);
  }
}

Matrix CholeskyFactor::solve(const Matrix& rhs) const {
  if (rhs.rows() != order()) throw ArgumentError("CholeskyFactor::solve: dimension mismatch");
  Matrix out = rhs;
  parallel::for_blocks(out.cols(), 32, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    for (std::ptrdiff_t c = begin; c < end; ++c) {
      Vector col = out.col(c);
      solve_in_place(col);
      out.col(c) = col;
    }
  });
  return out;
}

Matrix resolvent_apply(const SymmetricMatrix& m, double shift, ResolventSide side,
                       const Matrix& rhs) {
  Matrix s = (side == ResolventSide::kUpper) ? Matrix(-m.dense()) : Matrix(m.dense());
  s.diagonal().array() += (side == ResolventSide::kUpper) ? shift : -shift;
  return CholeskyFactor(s).solve(rhs);
}

// ---------------------------------------------------------------------------
// Rank-one identities

SymmetricMatrix sherman_morrison_inverse_update(const SymmetricMatrix& m_inv, const Vector& z) {
  if (z.size() != m_inv.order())
    throw ArgumentError("sherman_morrison_inverse_update: dimension mismatch");
  const Vector w = m_inv.dense() * z;
  const double denom = 1.0 + w.dot(z);
  if (std::abs(denom) < 1e-12)
    throw SingularUpdateError("sherman_morrison_inverse_update: 1 + <M^{-1}z, z> vanishes");
  return m_inv.plus_rank_one(-1.0 / denom, w);
}

double trace_after_rank_one(double m_inv_trace, const Vector& m_inv_z, double m_inv2_z_dot_z,
                            const Vector& z) {
  if (m_inv_z.size() != z.size()) throw ArgumentError("trace_after_rank_one: dimension mismatch");
  const double denom = 1.0 + m_inv_z.dot(z);
  if (std::abs(denom) < 1e-12)
    throw SingularUpdateError("trace_after_rank_one: 1 + <M^{-1}z, z> vanishes");
  return m_inv_trace - m_inv2_z_dot_z / denom;
}

// ---------------------------------------------------------------------------
// Isotropic reduction

ReductionMap::ReductionMap(Matrix basis, Vector eigenvalues)
    : basis_(std::move(basis)), eigenvalues_(std::move(eigenvalues)) {
  if (basis_.cols() != eigenvalues_.size())
    throw ArgumentError("ReductionMap: basis and eigenvalue counts differ");
  if ((eigenvalues_.array() <= 0.0).any())
    throw ArgumentError("ReductionMap: eigenvalues must be positive");
}

Matrix ReductionMap::whitening_operator() const {
  return eigenvalues_.cwiseSqrt().cwiseInverse().asDiagonal() * basis_.transpose();
}

Matrix ReductionMap::unwhitening_operator() const {
  return basis_ * eigenvalues_.cwiseSqrt().asDiagonal();
}

Matrix ReductionMap::whiten(const Matrix& x) const { return whitening_operator() * x; }

Matrix ReductionMap::to_reduced(const Matrix& w) const {
  return eigenvalues_.cwiseSqrt().asDiagonal() * (basis_.transpose() * w);
}

Matrix ReductionMap::from_reduced(const Matrix& v) const {
  return basis_ * (eigenvalues_.cwiseSqrt().cwiseInverse().asDiagonal() * v);
}

IsotropicReduction isotropic_reduce(const Frame& frame, double rank_tol) {
  const Index n = frame.ambient_dim();
  if (rank_tol < 0) rank_tol = default_rank_tolerance(n);
  if (frame.size() == 0) throw ValidationError("isotropic_reduce: empty frame");
  const EigenDecomposition eig = eigh(frame.outer_product_sum());
  const double top = eig.largest();
  if (!(top > 0.0)) throw ValidationError("isotropic_reduce: zero frame");
  Index r = 0;
  while (r < n && eig.values(r) > rank_tol * top) ++r;
  if (r == 0) throw ValidationError("isotropic_reduce: all eigenvalues below rank tolerance");

  ReductionMap map(eig.vectors.leftCols(r), eig.values.head(r));
  Frame reduced = Frame::certified(map.whiten(frame.vectors()));
  return IsotropicReduction{std::move(reduced), std::move(map)};
}

double operator_norm(const Matrix& t) {
  if (t.size() == 0) return 0.0;
  const Matrix gram = (t.rows() <= t.cols()) ? Matrix(t * t.transpose()) : Matrix(t.transpose() * t);
  const double top = eigh(SymmetricMatrix::from_dense(gram, 1e-10)).largest();
  return std::sqrt(std::max(0.0, top));
}

}  // namespace rforge
