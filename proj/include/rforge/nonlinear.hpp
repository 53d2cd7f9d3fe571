#pragma once

// p-sparsifier quality on probe configurations, the q <= p monotonicity
// check, and the weighted-cycle pair that is a good p-sparsifier but a poor
// q-sparsifier for q > p.
//
// H is a p-sparsifier of G with quality C when, for some lambda > 0 and all
// x in R^n,
//   lambda E_G(x) <= E_H(x) <= C lambda E_G(x),  E_G(x) = sum_ij g_ij |x_i - x_j|^p.
// Over a finite probe set the best C is max R / min R with R = E_H / E_G.

#include "rforge/graph.hpp"
#include "rforge/linalg.hpp"

#include <cstdint>
#include <vector>

namespace rforge {

/// sum over ordered pairs: each edge contributes 2 w |x_u - x_v|^p.
double p_energy(const WeightedGraph& g, const Vector& x, double p);

/// Probe configurations with nonzero G-energy. A configuration has zero
/// energy exactly when it is constant across every edge, for any p > 0, so the
/// filter does not depend on the exponent.
class ProbeSet {
 public:
  ProbeSet(const WeightedGraph& g, std::vector<Vector> candidates);

  const std::vector<Vector>& probes() const noexcept { return probes_; }
  std::size_t size() const noexcept { return probes_.size(); }
  std::size_t dropped() const noexcept { return dropped_; }

 private:
  std::vector<Vector> probes_;
  std::size_t dropped_ = 0;
};

/// `count` standard-normal configurations in R^n from a fixed seed.
std::vector<Vector> random_probes(Index n, std::size_t count, std::uint64_t seed);

inline constexpr std::uint64_t kDefaultProbeSeed = 0x5EED;
inline constexpr std::size_t kDefaultProbeCount = 500;

struct QualityEstimate {
  double lower_bound = 1.0;  // max R / min R
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;
  std::size_t probe_count = 0;
  /// Scalings lambda compatible with quality `quality`: [max R / quality, min R].
  double quality = 0.0;
  double lambda_low = 0.0;
  double lambda_high = 0.0;
};

/// Ratio-of-ratios over the probes. quality <= 0 takes quality = lower_bound,
/// which pins lambda to min R. Throws ValidationError when supp(h) is not a
/// subset of supp(g) or the vertex counts differ, ArgumentError when the probe
/// set is empty or p <= 0.
QualityEstimate estimate_quality(const WeightedGraph& g, const WeightedGraph& h, double p,
                                 const ProbeSet& probes, double quality = 0.0);

double quality_lower_bound(const WeightedGraph& g, const WeightedGraph& h, double p,
                           const ProbeSet& probes);

struct CycleCounterexample {
  WeightedGraph g;   // n-cycle: edge {0, n-1} weight 1, path edges (n-1)^{p-1}/eps
  WeightedGraph h;   // g without the unit edge
  std::vector<Vector> witnesses;  // x_i = i, and the indicator of vertex 1
  double path_weight = 0.0;
  /// The p-quality bound 1 + eps rests on (sum |d_i|)^p <= (n-1)^{p-1} sum |d_i|^p,
  /// which needs p >= 1.
  bool p_guarantee_applies = false;
};

/// Throws ArgumentError unless n >= 3, p > 0, eps > 0.
CycleCounterexample cycle_counterexample(Index n, double p, double eps);

/// eps (n-1)^{q-p}: the growth rate of the q-quality of the cycle pair.
double cycle_q_growth(Index n, double p, double q, double eps);

/// The ratio-of-ratios the cycle pair attains on its two witnesses at
/// exponent q, in closed form: 1 + eps (n-1)^{q-p}.
double cycle_q_witness_bound(Index n, double p, double q, double eps);

struct MonotonicityReport {
  double p = 0.0;
  double q = 0.0;
  double quality = 0.0;  // the p-quality C being checked
  QualityEstimate estimate;
};

/// Evaluates the q-quality lower bound (q <= p) and throws CertificationFailure
/// when it exceeds quality + 1e-8.
MonotonicityReport monotonicity_check(const WeightedGraph& g, const WeightedGraph& h, double p,
                                      double q, const ProbeSet& probes, double quality);

}  // namespace rforge
