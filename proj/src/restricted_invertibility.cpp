#include "rforge/restricted_invertibility.hpp"

#include "rforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rforge {

namespace {

// sum_k c_k / (lambda_k - b) where c_k = ||T^* v_k||^2.
double potential_at(const Vector& lambdas, const Vector& weights, double b) {
  double s = 0.0;
  for (Index k = 0; k < lambdas.size(); ++k) s += weights(k) / (lambdas(k) - b);
  return s;
}

RiState make_state(long step, Matrix a, double b, std::vector<Index> selected, const Matrix& t) {
  RiState s;
  s.step = step;
  s.eig = eigh(SymmetricMatrix::from_dense(a, 0.0));
  s.a = std::move(a);
  s.b = b;
  s.selected = std::move(selected);
  const Vector w = (s.eig.vectors.transpose() * t).rowwise().squaredNorm();
  s.potential = potential_at(s.eig.values, w, b);
  return s;
}

}  // namespace

long ri_selection_size(double hs_sq, double op_sq, double eps) {
  if (!(op_sq > 0.0)) throw ArgumentError("ri_select: operator is zero");
  // The tiny relative slack keeps exact integer ratios from rounding down.
  return static_cast<long>(std::floor(eps * eps * hs_sq / op_sq * (1.0 + 1e-12)));
}

double ri_barrier(long i, double hs_sq, double op_sq, Index m, double eps) {
  const long k = ri_selection_size(hs_sq, op_sq, eps);
  if (i < 0 || i > k) {
    std::ostringstream os;
    os << "ri_barrier: step " << i << " outside [0, " << k << "]";
    throw ArgumentError(os.str());
  }
  return (1.0 - eps) / static_cast<double>(m) *
         (hs_sq - static_cast<double>(i) / eps * op_sq);
}

CandidateTest ri_candidate_test(const RiState& prev, double b_next, const Matrix& t,
                                const Vector& x, double mu) {
  const Vector w = t * x;
  const Vector z = prev.eig.vectors.transpose() * w;
  Vector scaled(z.size());
  for (Index k = 0; k < z.size(); ++k) scaled(k) = z(k) / (prev.eig.values(k) - b_next);
  const Vector r_inv_w = prev.eig.vectors * scaled;
  CandidateTest out;
  const double q = z.dot(scaled);
  out.one_plus_q = 1.0 + q;
  out.lhs = (t.transpose() * r_inv_w).squaredNorm();
  out.rhs = -mu * out.one_plus_q;
  return out;
}

RiResult ri_select(const Frame& frame, const Matrix& t, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("ri_select: eps must lie in (0,1)");
  if (t.cols() != frame.ambient_dim()) {
    std::ostringstream os;
    os << "ri_select: operator has " << t.cols() << " columns but the frame lives in R^"
       << frame.ambient_dim();
    throw ArgumentError(os.str());
  }
  if (frame.size() == 0) throw ArgumentError("ri_select: empty frame");

  RiResult out;
  out.m = frame.size();

  // Work with an isotropic frame y_i and the operator T' with T' y_i = T x_i.
  Matrix y;
  Matrix tt;
  if (frame.isotropy_certified()) {
    y = frame.vectors();
    tt = t;
    out.reduced_dim = frame.ambient_dim();
  } else {
    const IsotropicReduction red = isotropic_reduce(frame);
    y = red.frame.vectors();
    tt = t * red.map.unwhitening_operator();
    out.whitened = true;
    out.reduced_dim = red.map.rank();
    out.warnings.push_back("frame is not isotropic; selection runs on its whitened copy");
  }

  out.hs_sq = tt.squaredNorm();
  const double op = operator_norm(tt);
  out.op_sq = op * op;
  if (!(out.op_sq > 0.0)) throw ArgumentError("ri_select: operator vanishes on the frame");
  out.k = ri_selection_size(out.hs_sq, out.op_sq, eps);
  out.lower_bound = (1.0 - eps) * (1.0 - eps) * out.hs_sq / static_cast<double>(out.m);

  if (out.k == 0) {
    out.warnings.push_back("selection size is zero; eps^2 ||T||_HS^2 < ||T||^2");
    out.gram = Matrix(0, 0);
    return out;
  }

  const Index big_n = tt.rows();
  const Vector cols_norm = (tt * y).colwise().squaredNorm();
  auto barrier = [&](long i) { return ri_barrier(i, out.hs_sq, out.op_sq, out.m, eps); };

  RiState state = make_state(0, Matrix::Zero(big_n, big_n), barrier(0), {}, tt);
  const double potential_cap = -static_cast<double>(out.m) / (1.0 - eps);
  std::vector<char> used(static_cast<std::size_t>(out.m), 0);

  for (long i = 1; i <= out.k; ++i) {
    const double b_next = barrier(i);
    const Vector tv = (state.eig.vectors.transpose() * tt).rowwise().squaredNorm();
    const double prev_potential = state.potential;
    const double mu = prev_potential - potential_at(state.eig.values, tv, b_next);
    const double scale = std::max(std::abs(prev_potential), 1.0);
    if (mu < -1e-9 * scale) {
      std::ostringstream os;
      os << "ri_select: step " << i << " has negative potential gap mu = " << mu;
      throw InvariantViolation(os.str());
    }
    if (prev_potential > potential_cap + 1e-9 * std::abs(potential_cap)) {
      std::ostringstream os;
      os << "ri_select: potential " << prev_potential << " exceeds -m/(1-eps) = "
         << potential_cap << " before step " << i;
      throw InvariantViolation(os.str());
    }

    // Kernel of A_{i-1} and ||Q_{i-1} T||_HS^2.
    const double a_norm = state.step == 0 ? 0.0 : std::max(state.eig.largest(), 0.0);
    double kernel_hs = 0.0;
    for (Index k = 0; k < big_n; ++k)
      if (std::abs(state.eig.values(k)) <= 1e-9 * a_norm) kernel_hs += tv(k);
    const double kernel_floor = out.hs_sq - static_cast<double>(i - 1) * out.op_sq;
    if (kernel_hs < kernel_floor - 1e-9 * std::max(out.hs_sq, 1.0)) {
      std::ostringstream os;
      os << "ri_select: ||Q T||_HS^2 = " << kernel_hs << " below " << kernel_floor << " at step "
         << i;
      throw InvariantViolation(os.str());
    }

    Index best = -1;
    CandidateTest best_test;
    double best_gap = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < out.m; ++j) {
      if (used[static_cast<std::size_t>(j)] || cols_norm(j) == 0.0) continue;
      const CandidateTest c = ri_candidate_test(state, b_next, tt, y.col(j), mu);
      const double slack = 1e-12 * std::max({std::abs(c.lhs), std::abs(c.rhs), 1.0});
      if (!(c.lhs < c.rhs - slack)) continue;
      const double gap = c.lhs - c.rhs;
      if (gap < best_gap) {
        best_gap = gap;
        best = j;
        best_test = c;
      }
    }
    if (best < 0) {
      std::ostringstream os;
      os << "ri_select: no candidate satisfies the selection inequality at step " << i
         << " (mu = " << mu << ")";
      throw InvariantViolation(os.str());
    }
    if (!(best_test.one_plus_q < 0.0)) {
      std::ostringstream os;
      os << "ri_select: chosen index " << best << " has 1 + <R^{-1}Tx, Tx> = "
         << best_test.one_plus_q << " >= 0 at step " << i;
      throw InvariantViolation(os.str());
    }
    used[static_cast<std::size_t>(best)] = 1;

    const Vector w = tt * y.col(best);
    Matrix a_next = state.a + w * w.transpose();
    std::vector<Index> sel = state.selected;
    sel.push_back(best);
    RiState next = make_state(i, std::move(a_next), b_next, std::move(sel), tt);

    if (!(next.potential < prev_potential + 1e-9 * scale)) {
      std::ostringstream os;
      os << "ri_select: potential did not decrease at step " << i << " (" << prev_potential
         << " -> " << next.potential << ")";
      throw InvariantViolation(os.str());
    }
    const double norm_next = std::max(next.eig.largest(), 0.0);
    long above = 0;
    for (Index k = 0; k < big_n; ++k) {
      const double lam = next.eig.values(k);
      if (lam > b_next) {
        ++above;
      } else if (std::abs(lam) > 1e-9 * norm_next) {
        std::ostringstream os;
        os << "ri_select: eigenvalue " << lam << " of A_" << i << " is neither above b_i = "
           << b_next << " nor zero";
        throw InvariantViolation(os.str());
      }
    }
    if (above != i) {
      std::ostringstream os;
      os << "ri_select: A_" << i << " has " << above << " eigenvalues above b_i, expected " << i;
      throw InvariantViolation(os.str());
    }

    RiStepRecord rec;
    rec.step = i;
    rec.chosen = best;
    rec.b = b_next;
    rec.mu = mu;
    rec.lhs = best_test.lhs;
    rec.rhs = best_test.rhs;
    rec.one_plus_q = best_test.one_plus_q;
    rec.previous_potential = prev_potential;
    rec.potential = next.potential;
    rec.eigenvalues_above_barrier = above;
    rec.kernel_hs_sq = kernel_hs;
    rec.kernel_hs_floor = kernel_floor;
    out.steps.push_back(rec);
    state = std::move(next);
  }

  out.sigma = state.selected;
  {
    std::vector<Index> sorted = out.sigma;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvariantViolation("ri_select: selected indices are not distinct");
  }

  // Gram matrix from the original vectors and operator.
  const Index k = static_cast<Index>(out.sigma.size());
  Matrix images(t.rows(), k);
  for (Index c = 0; c < k; ++c) images.col(c) = t * frame.vector(out.sigma[c]);
  out.gram = images.transpose() * images;
  out.gram = 0.5 * (out.gram + out.gram.transpose()).eval();
  out.gram_lambda_min = eigh(SymmetricMatrix::from_dense(out.gram, 0.0)).smallest();
  if (out.gram_lambda_min < out.lower_bound - 1e-8) {
    std::ostringstream os;
    os << "ri_select: lambda_min of the selected Gram matrix is " << out.gram_lambda_min
       << ", below the bound " << out.lower_bound;
    throw CertificationFailure(os.str());
  }
  return out;
}

}  // namespace rforge
