#include "rforge/bss.hpp"

#include "rforge/error.hpp"
#include "rforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rforge {
namespace {

constexpr double kFeasibilitySlack = 1e-9;
constexpr double kUpperConservationTol = 1e-8;
constexpr double kLowerMonotoneTol = 1e-9;
constexpr double kCandidateSumTol = 1e-8;
constexpr double kSandwichTol = 1e-8;
constexpr double kTieTol = 1e-12;

void require_eps(double eps, const char* where) {
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream os;
    os << where << ": eps must lie in (0,1), got " << eps;
    throw ArgumentError(os.str());
  }
}

[[noreturn]] void violation(const std::string& what, long step) {
  std::ostringstream os;
  os << "barrier iteration, step " << step << ": " << what;
  throw InvariantViolation(os.str());
}

}  // namespace

long bss_iteration_count(Index n, double eps) {
  require_eps(eps, "bss_iteration_count");
  return static_cast<long>(std::ceil(static_cast<double>(n) / (eps * eps)));
}

double bss_theta(double eps) { return (1.0 + eps) / (1.0 - eps); }

double eps_for_ratio(double ratio) {
  if (!(ratio > 1.0)) throw ArgumentError("eps_for_ratio: ratio must exceed 1");
  const double r = std::sqrt(ratio);
  return (r - 1.0) / (r + 1.0);
}

// ---------------------------------------------------------------------------
// BarrierState

BarrierState::BarrierState(SymmetricMatrix a, double eps, long step)
    : a_(std::move(a)), eps_(eps), theta_(bss_theta(eps)), step_(step),
      eigenvalues_(eigh(a_).values) {}

BarrierState BarrierState::initial(Index n, double eps) {
  require_eps(eps, "BarrierState");
  return BarrierState(SymmetricMatrix::zero(n), eps, 0);
}

double BarrierState::upper_barrier_at(long i) const {
  return theta_ * (static_cast<double>(dim()) / eps_ + static_cast<double>(i));
}

double BarrierState::lower_barrier_at(long i) const {
  return -static_cast<double>(dim()) / eps_ + static_cast<double>(i);
}

double BarrierState::upper_potential_at(double u) const {
  double s = 0.0;
  for (Index j = 0; j < eigenvalues_.size(); ++j) s += 1.0 / (u - eigenvalues_(j));
  return s;
}

double BarrierState::lower_potential_at(double l) const {
  double s = 0.0;
  for (Index j = 0; j < eigenvalues_.size(); ++j) s += 1.0 / (eigenvalues_(j) - l);
  return s;
}

void BarrierState::check_window() const {
  const double lo = eigenvalues_(eigenvalues_.size() - 1);
  const double hi = eigenvalues_(0);
  if (!(lo > lower()) || !(hi < upper())) {
    std::ostringstream os;
    os << "spectrum [" << lo << ", " << hi << "] left the window (" << lower() << ", "
       << upper() << ")";
    violation(os.str(), step_);
  }
}

BarrierState BarrierState::advanced(double t, const Vector& x) const {
  return BarrierState(a_.plus_rank_one(t, x), eps_, step_ + 1);
}

// ---------------------------------------------------------------------------
// One step

BarrierGaps barrier_gaps(const BarrierState& state) {
  const long i = state.step() + 1;
  const double u_prev = state.upper_barrier_at(i - 1);
  const double u_next = state.upper_barrier_at(i);
  const double l_prev = state.lower_barrier_at(i - 1);
  const double l_next = state.lower_barrier_at(i);
  const Vector& lambda = state.eigenvalues();

  if (!(lambda(lambda.size() - 1) > l_next))
    violation("lambda_min does not exceed the next lower barrier", i);

  // Both gaps are sums of positive products; forming them this way avoids
  // cancellation between two nearly equal potentials.
  double a = 0.0;
  double b = 0.0;
  for (Index j = 0; j < lambda.size(); ++j) {
    a += (u_next - u_prev) / ((u_prev - lambda(j)) * (u_next - lambda(j)));
    b += (l_next - l_prev) / ((lambda(j) - l_next) * (lambda(j) - l_prev));
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    std::ostringstream os;
    os << "nonpositive potential gap (a = " << a << ", b = " << b << ")";
    violation(os.str(), i);
  }
  return {a, b};
}

CandidateScores candidate_scores(const BarrierState& state, const Frame& frame, double a,
                                 double b) {
  if (!frame.isotropy_certified())
    throw ArgumentError("candidate_scores: frame must be isotropy-certified");
  if (frame.ambient_dim() != state.dim())
    throw ArgumentError("candidate_scores: frame dimension does not match state");

  const long i = state.step() + 1;
  const Matrix& x = frame.vectors();
  Matrix up, lo;
  try {
    up = resolvent_apply(state.matrix(), state.upper_barrier_at(i), ResolventSide::kUpper, x);
    lo = resolvent_apply(state.matrix(), state.lower_barrier_at(i), ResolventSide::kLower, x);
  } catch (const FactorizationError& e) {
    violation(std::string("barrier matrix not positive definite: ") + e.what(), i);
  }

  const Index m = frame.size();
  CandidateScores s;
  s.a = a;
  s.b = b;
  s.alphas.resize(m);
  s.betas.resize(m);
  s.upper_q1.resize(m);
  s.upper_q2.resize(m);
  s.lower_q1.resize(m);
  s.lower_q2.resize(m);
  parallel::for_blocks(m, 64, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    for (std::ptrdiff_t j = begin; j < end; ++j) {
      const double uq1 = x.col(j).dot(up.col(j));
      const double uq2 = up.col(j).squaredNorm();
      const double lq1 = x.col(j).dot(lo.col(j));
      const double lq2 = lo.col(j).squaredNorm();
      s.upper_q1(j) = uq1;
      s.upper_q2(j) = uq2;
      s.lower_q1(j) = lq1;
      s.lower_q2(j) = lq2;
      s.alphas(j) = uq1 + uq2 / a;
      s.betas(j) = lq2 / b - lq1;
    }
  });
  for (Index j = 0; j < m; ++j) {
    s.alpha_sum += s.alphas(j);
    s.beta_sum += s.betas(j);
  }

  const double eps = state.eps();
  if (s.alpha_sum > 1.0 - eps + kCandidateSumTol) {
    std::ostringstream os;
    os << "sum of alphas " << s.alpha_sum << " exceeds 1 - eps = " << 1.0 - eps;
    violation(os.str(), i);
  }
  if (s.beta_sum < 1.0 - eps - kCandidateSumTol) {
    std::ostringstream os;
    os << "sum of betas " << s.beta_sum << " is below 1 - eps = " << 1.0 - eps;
    violation(os.str(), i);
  }
  if (s.beta_sum < s.alpha_sum - kFeasibilitySlack) {
    std::ostringstream os;
    os << "sum of betas " << s.beta_sum << " is below sum of alphas " << s.alpha_sum;
    violation(os.str(), i);
  }
  return s;
}

StepResult select_and_step(const BarrierState& state, const Frame& frame,
                           const CandidateScores& scores) {
  const long i = state.step() + 1;
  const Index m = frame.size();
  if (scores.alphas.size() != m || scores.betas.size() != m)
    throw ArgumentError("select_and_step: score count does not match frame size");

  Index best = -1;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < m; ++j) {
    if (!(scores.alphas(j) > 0.0)) continue;  // zero vector
    const double margin = scores.betas(j) - scores.alphas(j);
    // Margins within rounding of the incumbent count as ties; the lower index stays.
    if (best < 0 || margin > best_margin + kTieTol * std::max(1.0, std::abs(best_margin))) {
      best_margin = margin;
      best = j;
    }
  }
  if (best < 0 || best_margin < -kFeasibilitySlack) {
    std::ostringstream os;
    os << "no candidate with beta >= alpha (best margin " << best_margin << ")";
    violation(os.str(), i);
  }

  const double t = 1.0 / scores.alphas(best);
  const Vector x = frame.vector(best);
  const double l_next = state.lower_barrier_at(i);
  const double prev_lower = state.lower_potential();

  // Rank-one trace identity applied to A_{i-1} - l_i I + t x x^T.
  const Matrix solved = resolvent_apply(state.matrix(), l_next, ResolventSide::kLower, x);
  const double root_t = std::sqrt(t);
  const double predicted =
      trace_after_rank_one(state.lower_potential_at(l_next), root_t * solved.col(0),
                           t * solved.col(0).squaredNorm(), root_t * x);

  BarrierState next = state.advanced(t, x);
  next.check_window();

  StepRecord rec;
  rec.step = i;
  rec.chosen = best;
  rec.t = t;
  rec.a = scores.a;
  rec.b = scores.b;
  rec.alpha_sum = scores.alpha_sum;
  rec.beta_sum = scores.beta_sum;
  rec.margin = best_margin;
  rec.lower_barrier = next.lower();
  rec.upper_barrier = next.upper();
  rec.lambda_max = next.eigenvalues()(0);
  rec.lambda_min = next.eigenvalues()(next.dim() - 1);
  rec.upper_potential = next.upper_potential();
  rec.lower_potential = next.lower_potential();
  rec.previous_lower_potential = prev_lower;
  rec.predicted_lower_potential = predicted;

  const double target = next.eps() / next.theta();
  if (std::abs(rec.upper_potential - target) > kUpperConservationTol * target) {
    std::ostringstream os;
    os << "upper potential " << rec.upper_potential << " drifted from eps/theta = " << target;
    violation(os.str(), i);
  }
  if (rec.lower_potential > prev_lower + kLowerMonotoneTol) {
    std::ostringstream os;
    os << "lower potential increased from " << prev_lower << " to " << rec.lower_potential;
    violation(os.str(), i);
  }
  if (rec.lower_potential > next.eps() + kCandidateSumTol) {
    std::ostringstream os;
    os << "lower potential " << rec.lower_potential << " exceeds eps";
    violation(os.str(), i);
  }
  return StepResult{std::move(next), best, t, rec};
}

// ---------------------------------------------------------------------------
// Driver

SparseWeights SparseWeights::scaled(double factor) const {
  SparseWeights out{{}, source_size};
  for (const auto& [idx, w] : weights) out.weights.emplace(idx, w * factor);
  return out;
}

Vector SparseWeights::dense() const {
  Vector v = Vector::Zero(source_size);
  for (const auto& [idx, w] : weights) v(idx) = w;
  return v;
}

SparsifyResult sparsify_frame(const Frame& frame, double eps, const SparsifyOptions& options) {
  require_eps(eps, "sparsify_frame");
  if (frame.size() == 0) throw ValidationError("sparsify_frame: empty frame");

  // Work on an isotropic frame; whitening restricts to the span of the input.
  const Frame work = frame.isotropy_certified()
                         ? frame
                         : isotropic_reduce(frame, options.rank_tol).frame;

  SparsifyResult result;
  result.ambient_dim = frame.ambient_dim();
  result.reduced_dim = work.ambient_dim();
  result.eps = eps;
  result.theta = bss_theta(eps);
  result.iterations = bss_iteration_count(result.reduced_dim, eps);
  result.support_bound = result.iterations;

  std::map<Index, double> accumulated;
  BarrierState state = BarrierState::initial(result.reduced_dim, eps);
  for (long it = 0; it < result.iterations; ++it) {
    const BarrierGaps gaps = barrier_gaps(state);
    const CandidateScores scores = candidate_scores(state, work, gaps.a, gaps.b);
    StepResult step = select_and_step(state, work, scores);
    accumulated[step.chosen] += step.t;
    if (options.observer) options.observer(step.record);
    if (options.keep_history) result.history.push_back(step.record);
    state = std::move(step.state);
  }

  result.raw_lambda_max = state.eigenvalues()(0);
  result.raw_lambda_min = state.eigenvalues()(state.dim() - 1);
  const double theta_sq = result.theta * result.theta;
  if (result.raw_lambda_max > theta_sq * result.raw_lambda_min * (1.0 + kSandwichTol)) {
    std::ostringstream os;
    os << "condition number " << result.raw_lambda_max / result.raw_lambda_min
       << " exceeds theta^2 = " << theta_sq;
    violation(os.str(), result.iterations);
  }
  if (static_cast<long>(accumulated.size()) > result.support_bound)
    violation("support exceeds ceil(n/eps^2)", result.iterations);

  result.gamma = (1.0 - eps) * (1.0 - eps) / result.raw_lambda_min;
  SparseWeights raw{std::move(accumulated), frame.size()};
  result.weights = raw.scaled(result.gamma);

  // Certificate on the span: spectrum of sum s_i y_i y_i^T in whitened coordinates.
  Matrix weighted = work.vectors();
  const Vector s = result.weights.dense();
  for (Index j = 0; j < weighted.cols(); ++j) weighted.col(j) *= std::sqrt(s(j));
  const EigenDecomposition cert = eigh(SymmetricMatrix::gram_of_columns(weighted));
  result.certified_min = cert.smallest();
  result.certified_max = cert.largest();
  const double lo = (1.0 - eps) * (1.0 - eps);
  const double hi = (1.0 + eps) * (1.0 + eps);
  if (result.certified_min < lo - kSandwichTol || result.certified_max > hi + kSandwichTol) {
    std::ostringstream os;
    os << "sparsify_frame: certified spectrum [" << result.certified_min << ", "
       << result.certified_max << "] outside [" << lo << ", " << hi << "]";
    throw CertificationFailure(os.str());
  }
  return result;
}

}  // namespace rforge
