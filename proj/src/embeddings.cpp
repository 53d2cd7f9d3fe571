#include "rforge/embeddings.hpp"

#include "rforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace rforge {

namespace {

void require_eps(double eps, const char* who) {
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream os;
    os << who << ": eps must lie in (0,1), got " << eps;
    throw ArgumentError(os.str());
  }
}

double identity_deviation(const Matrix& m) {
  return (m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

double JohnDecomposition::identity_residual() const {
  Matrix sum = Matrix::Zero(dim(), dim());
  for (Index i = 0; i < size(); ++i)
    sum.noalias() += weights(i) * points.col(i) * points.col(i).transpose();
  return identity_deviation(sum);
}

Vector JohnDecomposition::center_of_mass() const {
  Vector c = Vector::Zero(dim());
  for (Index i = 0; i < size(); ++i) c += weights(i) * points.col(i);
  return c;
}

void JohnDecomposition::validate() const {
  std::ostringstream os;
  if (dim() < 1 || size() < 1) {
    os << "John decomposition: empty (" << dim() << " x " << size() << ")";
    throw ValidationError(os.str());
  }
  if (weights.size() != size()) {
    os << "John decomposition: " << size() << " points but " << weights.size() << " weights";
    throw ValidationError(os.str());
  }
  for (Index i = 0; i < size(); ++i) {
    if (!std::isfinite(weights(i)) || !(weights(i) > 0.0)) {
      os << "John decomposition: weight " << i << " is " << weights(i);
      throw ValidationError(os.str());
    }
    const double dev = std::abs(points.col(i).norm() - 1.0);
    if (!(dev <= 1e-10)) {
      os << "John decomposition: point " << i << " has | ||x|| - 1 | = " << dev;
      throw ValidationError(os.str());
    }
  }
  const double id = identity_residual();
  if (!(id <= 1e-8)) {
    os << "John decomposition: identity residual " << id << " exceeds 1e-8";
    throw ValidationError(os.str());
  }
  const double com = center_of_mass().cwiseAbs().maxCoeff();
  if (!(com <= 1e-8)) {
    os << "John decomposition: center of mass residual " << com << " exceeds 1e-8";
    throw ValidationError(os.str());
  }
}

JohnApproximation approximate_john(const JohnDecomposition& jd, double eps) {
  jd.validate();
  require_eps(eps, "approximate_john");
  const Index n = jd.dim();

  JohnApproximation out;
  out.eps = eps;
  out.eps0 = eps_for_ratio(1.0 + eps / 4.0);
  out.support_bound = bss_iteration_count(n, out.eps0);

  Matrix scaled = jd.points;
  for (Index i = 0; i < jd.size(); ++i) scaled.col(i) *= std::sqrt(jd.weights(i));
  out.frame = sparsify_frame(Frame::certified(std::move(scaled)), out.eps0);
  const double norm = 1.0 / ((1.0 - out.eps0) * (1.0 - out.eps0));

  // A = sum s_i c_i x_i x_i^T with spectrum in [1, 1 + eps/4].
  Matrix a = Matrix::Zero(n, n);
  for (const auto& [i, w] : out.frame.weights.weights) {
    out.support.push_back(i);
    a.noalias() += (w * norm * jd.weights(i)) * jd.points.col(i) * jd.points.col(i).transpose();
  }
  const EigenDecomposition eig = eigh(SymmetricMatrix::from_dense(a, 1e-10));
  out.a_deviation = std::max(std::abs(eig.largest() - 1.0), std::abs(eig.smallest() - 1.0));
  if (out.a_deviation > eps / 4.0 + 1e-8) {
    std::ostringstream os;
    os << "approximate_john: ||A - I|| = " << out.a_deviation << " exceeds eps/4 = " << eps / 4.0;
    throw CertificationFailure(os.str());
  }
  Vector inv_sqrt(n);
  for (Index k = 0; k < n; ++k) inv_sqrt(k) = 1.0 / std::sqrt(eig.values(k));
  const Matrix a_inv_half = eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose();

  const Index kept = static_cast<Index>(out.support.size());
  out.decomposition.points.resize(n, 2 * kept);
  out.decomposition.weights.resize(2 * kept);
  for (Index r = 0; r < kept; ++r) {
    const Index i = out.support[static_cast<std::size_t>(r)];
    const Vector v = a_inv_half * jd.points.col(i);
    const double len = v.norm();
    const double ai = 0.5 * jd.weights(i) * out.frame.weights.weights.at(i) * norm * len * len;
    const Vector z = v / len;
    out.decomposition.points.col(2 * r) = z;
    out.decomposition.points.col(2 * r + 1) = -z;
    out.decomposition.weights(2 * r) = ai;
    out.decomposition.weights(2 * r + 1) = ai;
  }

  const double id = out.decomposition.identity_residual();
  if (!(id <= 1e-8)) {
    std::ostringstream os;
    os << "approximate_john: output identity residual " << id << " exceeds 1e-8";
    throw CertificationFailure(os.str());
  }
  if (out.decomposition.center_of_mass().cwiseAbs().maxCoeff() != 0.0)
    throw CertificationFailure("approximate_john: output center of mass is not exactly zero");
  return out;
}

double CutDecomposition::distance(Index i, Index j) const {
  double d = 0.0;
  for (const Cut& c : cuts) {
    const bool in_i = std::binary_search(c.members.begin(), c.members.end(), i);
    const bool in_j = std::binary_search(c.members.begin(), c.members.end(), j);
    if (in_i != in_j) d += c.weight;
  }
  return d;
}

CutDecomposition cut_decompose(const Matrix& points) {
  const Index n = points.rows();
  if (n < 2) throw ArgumentError("cut_decompose: need at least two points");
  if (!points.allFinite()) throw ArgumentError("cut_decompose: non-finite coordinate");

  CutDecomposition out;
  out.n = n;
  std::map<std::vector<Index>, std::size_t> seen;
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index c = 0; c < points.cols(); ++c) {
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Index x, Index y) { return points(x, c) < points(y, c); });
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const double lo = points(order[k], c);
      const double hi = points(order[k + 1], c);
      if (!(hi > lo)) continue;
      std::vector<Index> members(order.begin() + static_cast<std::ptrdiff_t>(k) + 1, order.end());
      std::sort(members.begin(), members.end());
      // E and its complement separate the same pairs; keep the side without point 0.
      if (members.front() == 0) {
        std::vector<Index> rest;
        for (Index i = 0, at = 0; i < n; ++i) {
          if (at < static_cast<Index>(members.size()) && members[static_cast<std::size_t>(at)] == i)
            ++at;
          else
            rest.push_back(i);
        }
        members = std::move(rest);
      }
      const auto [it, fresh] = seen.emplace(members, out.cuts.size());
      if (fresh)
        out.cuts.push_back({std::move(members), hi - lo});
      else
        out.cuts[it->second].weight += hi - lo;
    }
  }
  return out;
}

double l1_distance(const Matrix& points, Index i, Index j) {
  return (points.row(i) - points.row(j)).cwiseAbs().sum();
}

L1Embedding embed_l1(const Matrix& points, double eps) {
  require_eps(eps, "embed_l1");
  const Index n = points.rows();
  if (n < 2) throw ArgumentError("embed_l1: need at least two points");

  L1Embedding out;
  out.eps = eps;
  out.eps0 = eps_for_ratio(1.0 + eps);
  out.dimension_bound = bss_iteration_count(n, out.eps0);
  out.cuts = cut_decompose(points);
  if (out.cuts.cuts.empty()) {
    out.points = Matrix::Zero(n, 0);
    out.cut_scale = Vector(0);
    return out;
  }

  const Index m = static_cast<Index>(out.cuts.cuts.size());
  Matrix x = Matrix::Zero(n, m);
  for (Index e = 0; e < m; ++e) {
    const Cut& cut = out.cuts.cuts[static_cast<std::size_t>(e)];
    const double r = std::sqrt(cut.weight);
    for (Index i : cut.members) x(i, e) = r;
  }
  out.frame = sparsify_frame(Frame(n, std::move(x)), out.eps0);
  const double norm = 1.0 / ((1.0 - out.eps0) * (1.0 - out.eps0));

  const Index k = static_cast<Index>(out.frame.weights.support());
  out.points = Matrix::Zero(n, k);
  out.cut_scale.resize(k);
  Index col = 0;
  for (const auto& [e, s] : out.frame.weights.weights) {
    out.selected.push_back(e);
    const Cut& cut = out.cuts.cuts[static_cast<std::size_t>(e)];
    out.cut_scale(col) = s * norm;
    for (Index i : cut.members) out.points(i, col) = s * norm * cut.weight;
    ++col;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double src = l1_distance(points, i, j);
      const double dst = l1_distance(out.points, i, j);
      if (src == 0.0) {
        if (dst != 0.0) {
          std::ostringstream os;
          os << "embed_l1: coincident points " << i << ", " << j << " were separated";
          throw CertificationFailure(os.str());
        }
        continue;
      }
      lo = std::min(lo, dst / src);
      hi = std::max(hi, dst / src);
    }
  }
  if (hi == 0.0) lo = hi = 1.0;
  out.min_distortion = lo;
  out.max_distortion = hi;
  if (lo < 1.0 - 1e-8 || hi > 1.0 + eps + 1e-8) {
    std::ostringstream os;
    os << "embed_l1: distortion range [" << lo << ", " << hi << "] outside [1, " << 1.0 + eps
       << "]";
    throw CertificationFailure(os.str());
  }
  return out;
}

long multiset_count(long n, long k) {
  if (n < 1 || k < 0) return k == 0 ? 1 : 0;
  // C(n + k - 1, k), built incrementally so every partial product is integral.
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - 1 + i) / i;
  return r;
}

Matrix pivoted_orthonormal_basis(const Matrix& columns, double tol_scale) {
  const Index rows = columns.rows();
  const Index cols = columns.cols();
  if (tol_scale <= 0.0) tol_scale = static_cast<double>(cols);
  Matrix work = columns;
  double max_norm = 0.0;
  for (Index j = 0; j < cols; ++j) max_norm = std::max(max_norm, work.col(j).norm());
  const double tol = tol_scale * std::numeric_limits<double>::epsilon() * max_norm;

  Matrix q(rows, std::min(rows, cols));
  Index rank = 0;
  std::vector<char> used(static_cast<std::size_t>(cols), 0);
  while (rank < q.cols()) {
    Index pick = -1;
    double best = tol;
    for (Index j = 0; j < cols; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double r = work.col(j).norm();
      if (r > best) {
        best = r;
        pick = j;
      }
    }
    if (pick < 0) break;
    used[static_cast<std::size_t>(pick)] = 1;
    Vector v = work.col(pick);
    // Second pass against the accepted directions.
    for (Index k = 0; k < rank; ++k) v -= q.col(k).dot(v) * q.col(k);
    const double len = v.norm();
    if (!(len > tol)) continue;
    v /= len;
    q.col(rank++) = v;
    for (Index j = 0; j < cols; ++j)
      if (!used[static_cast<std::size_t>(j)]) work.col(j) -= v.dot(work.col(j)) * v;
  }
  return q.leftCols(rank);
}

Vector LpEmbedding::map(const Vector& x) const {
  Vector out(static_cast<Index>(selected.size()));
  for (std::size_t k = 0; k < selected.size(); ++k)
    out(static_cast<Index>(k)) = coordinate_scale(static_cast<Index>(k)) * x(selected[k]);
  return out;
}

double LpEmbedding::distortion(const Vector& x) const {
  const auto pnorm = [this](const Vector& v) {
    return std::pow(v.array().abs().pow(p).sum(), 1.0 / p);
  };
  return pnorm(map(x)) / pnorm(x);
}

LpEmbedding embed_lp_even(const Matrix& basis, int p, double eps) {
  if (p < 4 || p % 2 != 0) {
    std::ostringstream os;
    os << "embed_lp_even: p must be an even integer >= 4, got " << p;
    throw ArgumentError(os.str());
  }
  require_eps(eps, "embed_lp_even");
  const Index n = basis.rows();
  const Index m = basis.cols();
  if (n < 1 || m < 1) throw ArgumentError("embed_lp_even: empty basis");
  if (!basis.allFinite()) throw ArgumentError("embed_lp_even: non-finite basis entry");
  const Index rank = pivoted_orthonormal_basis(basis.transpose()).cols();
  if (rank < n) {
    std::ostringstream os;
    os << "embed_lp_even: basis of " << n << " vectors has rank " << rank;
    throw ValidationError(os.str());
  }

  LpEmbedding out;
  out.p = p;
  out.n = n;
  out.m = m;
  out.eps = eps;
  const int half = p / 2;
  out.d_bound = multiset_count(n, half);

  // Coordinatewise products u_{j_1} ... u_{j_{p/2}} over nondecreasing index tuples.
  Matrix monomials(m, out.d_bound);
  std::vector<Index> idx(static_cast<std::size_t>(half), 0);
  for (long c = 0; c < out.d_bound; ++c) {
    Vector v = Vector::Ones(m);
    for (Index j : idx) v = v.cwiseProduct(basis.row(j).transpose());
    monomials.col(c) = v;
    int pos = half - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - 1) --pos;
    if (pos < 0) break;
    const Index next = idx[static_cast<std::size_t>(pos)] + 1;
    for (int q = pos; q < half; ++q) idx[static_cast<std::size_t>(q)] = next;
  }
  out.y_basis = pivoted_orthonormal_basis(monomials);
  out.d = out.y_basis.cols();
  if (out.d > out.d_bound) throw InvariantViolation("embed_lp_even: dim(Y) exceeds its bound");

  out.ratio_bound = 1.0 + eps * p / 4.0;
  out.eps0 = eps_for_ratio(out.ratio_bound);
  out.support_bound = bss_iteration_count(out.d, out.eps0);
  const Matrix frame_vectors = out.y_basis.transpose();  // d x m, column i is x_i
  out.frame = sparsify_frame(Frame::certified(frame_vectors), out.eps0);
  const double norm = 1.0 / ((1.0 - out.eps0) * (1.0 - out.eps0));

  const Index k = static_cast<Index>(out.frame.weights.support());
  out.weights.resize(k);
  out.coordinate_scale.resize(k);
  Matrix weighted(out.d, k);
  Index col = 0;
  for (const auto& [i, s] : out.frame.weights.weights) {
    out.selected.push_back(i);
    out.weights(col) = s * norm;
    out.coordinate_scale(col) = std::pow(s * norm, 1.0 / p);
    weighted.col(col) = std::sqrt(s * norm) * frame_vectors.col(i);
    ++col;
  }
  const EigenDecomposition cert = eigh(SymmetricMatrix::gram_of_columns(weighted));
  out.certified_min = cert.smallest();
  out.certified_max = cert.largest();
  if (out.certified_min < 1.0 - 1e-8 || out.certified_max > out.ratio_bound + 1e-8) {
    std::ostringstream os;
    os << "embed_lp_even: quadratic form on Y has spectrum [" << out.certified_min << ", "
       << out.certified_max << "], outside [1, " << out.ratio_bound << "]";
    throw CertificationFailure(os.str());
  }
  return out;
}

}  // namespace rforge
