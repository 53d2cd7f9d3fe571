#pragma once

// Deterministic restricted-invertibility column selection.
//
// Given an isotropic frame x_1..x_m (sum x_i x_i^T = I) and an operator T,
// selects k = floor(eps^2 ||T||_HS^2 / ||T||^2) distinct indices such that the
// Gram matrix (<T x_i, T x_j>) over the selection has every eigenvalue at
// least (1-eps)^2 ||T||_HS^2 / m. The selection moves a single barrier
//   b_i = (1-eps)/m (||T||_HS^2 - (i/eps) ||T||^2)
// downwards while A_i = sum_{j<=i} (T y_j)(T y_j)^T keeps exactly i
// eigenvalues above it, and the potential tr(T^*(A_i - b_i I)^{-1} T)
// strictly decreases.

#include "rforge/linalg.hpp"

#include <string>
#include <vector>

namespace rforge {

/// floor(eps^2 * hs_sq / op_sq).
long ri_selection_size(double hs_sq, double op_sq, double eps);

/// Barrier b_i; throws ArgumentError for i outside [0, k].
double ri_barrier(long i, double hs_sq, double op_sq, Index m, double eps);

/// State after i selections.
struct RiState {
  long step = 0;
  Matrix a;                     // A_i, N x N
  double b = 0.0;               // b_i
  std::vector<Index> selected;  // in selection order
  EigenDecomposition eig;       // of A_i
  double potential = 0.0;       // tr(T^*(A_i - b_i I)^{-1} T)
};

struct CandidateTest {
  double lhs = 0.0;  // <R^{-1} T T^* R^{-1} T x, T x>, R = A_{i-1} - b_i I
  double rhs = 0.0;  // -mu (1 + <R^{-1} T x, T x>)
  double one_plus_q = 0.0;
};

/// Both sides of the selection inequality for one candidate x at the step
/// from `prev` (holding A_{i-1}) to barrier b_next = b_i.
CandidateTest ri_candidate_test(const RiState& prev, double b_next, const Matrix& t,
                                const Vector& x, double mu);

struct RiStepRecord {
  long step = 0;
  Index chosen = 0;
  double b = 0.0;
  double mu = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double one_plus_q = 0.0;
  double previous_potential = 0.0;
  double potential = 0.0;
  long eigenvalues_above_barrier = 0;
  double kernel_hs_sq = 0.0;     // ||Q_{i-1} T||_HS^2
  double kernel_hs_floor = 0.0;  // ||T||_HS^2 - (i-1) ||T||^2
};

struct RiResult {
  std::vector<Index> sigma;  // source indices, selection order
  Matrix gram;               // (<T x_i, T x_j>)_{i,j in sigma}, original x and T
  long k = 0;
  double hs_sq = 0.0;        // of the operator acting on the isotropic frame
  double op_sq = 0.0;
  Index m = 0;
  double lower_bound = 0.0;  // (1-eps)^2 hs_sq / m
  double gram_lambda_min = 0.0;
  bool whitened = false;
  Index reduced_dim = 0;
  std::vector<RiStepRecord> steps;
  std::vector<std::string> warnings;
};

/// Runs the selection. `t` maps R^n (the frame's ambient space) to R^N.
/// Frames that are not isotropy-certified are whitened first, with T composed
/// accordingly; this is recorded in `whitened` and `warnings`.
RiResult ri_select(const Frame& frame, const Matrix& t, double eps);

}  // namespace rforge
