#pragma once

// Deterministic barrier-potential sparsification of an isotropic frame.
//
// Starting from A_0 = 0, each step adds t * x_j x_j^T for one frame vector so
// that the spectrum of A_i stays strictly inside (l_i, u_i), with
//   u_i = theta (n/eps + i),  l_i = -n/eps + i,  theta = (1+eps)/(1-eps).
// The upper potential sum 1/(u_i - lambda) is held constant at eps/theta and
// the lower potential sum 1/(lambda - l_i) never increases. After
// k = ceil(n/eps^2) steps lambda_max/lambda_min <= theta^2.

#include "rforge/linalg.hpp"

#include <functional>
#include <map>
#include <vector>

namespace rforge {

/// Number of barrier steps for dimension n: ceil(n / eps^2).
long bss_iteration_count(Index n, double eps);

/// (1+eps)/(1-eps).
double bss_theta(double eps);

/// Running state A_i of the barrier iteration together with its spectrum.
class BarrierState {
 public:
  /// A_0 = 0 in dimension n.
  static BarrierState initial(Index n, double eps);

  Index dim() const noexcept { return a_.order(); }
  double eps() const noexcept { return eps_; }
  double theta() const noexcept { return theta_; }
  long step() const noexcept { return step_; }
  const SymmetricMatrix& matrix() const noexcept { return a_; }
  /// Eigenvalues of A_i, descending.
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }

  double upper_barrier_at(long i) const;
  double lower_barrier_at(long i) const;
  double upper() const { return upper_barrier_at(step_); }
  double lower() const { return lower_barrier_at(step_); }

  /// sum_j 1/(u - lambda_j(A_i)) for an arbitrary barrier position u.
  double upper_potential_at(double u) const;
  /// sum_j 1/(lambda_j(A_i) - l) for an arbitrary barrier position l.
  double lower_potential_at(double l) const;
  double upper_potential() const { return upper_potential_at(upper()); }
  double lower_potential() const { return lower_potential_at(lower()); }

  /// Throws InvariantViolation unless l_i < lambda_min and lambda_max < u_i.
  void check_window() const;

  /// State after adding t x x^T; the step counter advances by one.
  BarrierState advanced(double t, const Vector& x) const;

 private:
  BarrierState(SymmetricMatrix a, double eps, long step);

  SymmetricMatrix a_;
  double eps_;
  double theta_;
  long step_;
  Vector eigenvalues_;
};

/// Potential drops that define the next step from state i-1:
///   a = Phi^{u_{i-1}}(A_{i-1}) - Phi^{u_i}(A_{i-1}),
///   b = Phi_{l_i}(A_{i-1})     - Phi_{l_{i-1}}(A_{i-1}).
struct BarrierGaps {
  double a;
  double b;
};

BarrierGaps barrier_gaps(const BarrierState& state);

/// Per-candidate quantities for the step from `state` (= A_{i-1}).
/// upper_q1 = <U^{-1} x, x>, upper_q2 = <U^{-2} x, x> with U = u_i I - A,
/// lower_q1, lower_q2 likewise with L = A - l_i I.
struct CandidateScores {
  Vector alphas;
  Vector betas;
  Vector upper_q1;
  Vector upper_q2;
  Vector lower_q1;
  Vector lower_q2;
  double a = 0.0;
  double b = 0.0;
  double alpha_sum = 0.0;
  double beta_sum = 0.0;
};

/// Computes alpha_j and beta_j for every frame vector with one Cholesky
/// factorization per barrier. Requires an isotropy-certified frame and checks
/// sum alpha <= 1 - eps, sum beta >= 1 - eps and sum beta >= sum alpha.
CandidateScores candidate_scores(const BarrierState& state, const Frame& frame, double a,
                                 double b);

/// Diagnostics for one completed step i.
struct StepRecord {
  long step = 0;
  Index chosen = 0;
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double alpha_sum = 0.0;
  double beta_sum = 0.0;
  double margin = 0.0;  // beta - alpha at the chosen index
  double lower_barrier = 0.0;
  double upper_barrier = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double upper_potential = 0.0;
  double lower_potential = 0.0;
  double previous_lower_potential = 0.0;
  /// Lower potential after the step predicted by the rank-one trace identity.
  double predicted_lower_potential = 0.0;
};

struct StepResult {
  BarrierState state;
  Index chosen;
  double t;
  StepRecord record;
};

/// Picks argmax_j (beta_j - alpha_j) (lowest index on ties; margins within
/// 1e-12 relative of each other count as tied), steps with
/// t = 1/alpha_j and verifies the window and both potential invariants on the
/// new state. Throws InvariantViolation when no j has beta_j >= alpha_j - 1e-9
/// or when any invariant fails.
StepResult select_and_step(const BarrierState& state, const Frame& frame,
                           const CandidateScores& scores);

/// Nonzero weights keyed by source index.
struct SparseWeights {
  std::map<Index, double> weights;
  Index source_size = 0;

  std::size_t support() const noexcept { return weights.size(); }
  SparseWeights scaled(double factor) const;
  Vector dense() const;
};

struct SparsifyOptions {
  bool keep_history = false;
  double rank_tol = -1.0;  // < 0: default_rank_tolerance
  std::function<void(const StepRecord&)> observer;
};

struct SparsifyResult {
  /// Weights s_i rescaled so that the spectrum of sum s_i y_i y_i^T on the
  /// span lies in [(1-eps)^2, (1+eps)^2] with the lower end attained.
  SparseWeights weights;
  Index ambient_dim = 0;
  Index reduced_dim = 0;  // rank of the input frame
  long iterations = 0;    // ceil(reduced_dim / eps^2)
  long support_bound = 0; // same value; compared against the distinct count
  double eps = 0.0;
  double theta = 0.0;
  double raw_lambda_min = 0.0;  // spectrum of A_k before rescaling
  double raw_lambda_max = 0.0;
  double gamma = 0.0;           // (1-eps)^2 / raw_lambda_min
  double certified_min = 0.0;   // spectrum of the rescaled sum on the span
  double certified_max = 0.0;
  std::vector<StepRecord> history;
};

/// Runs the barrier iteration on the frame (whitening it first when it is not
/// isotropy-certified). Throws ArgumentError for eps outside (0,1).
SparsifyResult sparsify_frame(const Frame& frame, double eps, const SparsifyOptions& options = {});

/// eps0 with ((1+eps0)/(1-eps0))^2 = ratio, i.e. (sqrt(r)-1)/(sqrt(r)+1).
double eps_for_ratio(double ratio);

}  // namespace rforge
