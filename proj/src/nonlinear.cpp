#include "rforge/nonlinear.hpp"

#include "rforge/error.hpp"
#include "rforge/parallel.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace rforge {

double p_energy(const WeightedGraph& g, const Vector& x, double p) {
  if (!(p > 0.0)) throw ArgumentError("p_energy: p must be positive");
  if (x.size() != g.vertex_count()) throw ArgumentError("p_energy: configuration size mismatch");
  double s = 0.0;
  for (const Edge& e : g.edges()) s += e.w * std::pow(std::abs(x(e.u) - x(e.v)), p);
  return 2.0 * s;
}

ProbeSet::ProbeSet(const WeightedGraph& g, std::vector<Vector> candidates) {
  for (Vector& x : candidates) {
    if (x.size() != g.vertex_count()) {
      std::ostringstream os;
      os << "ProbeSet: probe of size " << x.size() << " for a graph on " << g.vertex_count()
         << " vertices";
      throw ValidationError(os.str());
    }
    bool moves = false;
    for (const Edge& e : g.edges()) {
      if (x(e.u) != x(e.v)) {
        moves = true;
        break;
      }
    }
    if (moves)
      probes_.push_back(std::move(x));
    else
      ++dropped_;
  }
}

std::vector<Vector> random_probes(Index n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out(count, Vector(n));
  for (Vector& x : out)
    for (Index i = 0; i < n; ++i) x(i) = normal(rng);
  return out;
}

QualityEstimate estimate_quality(const WeightedGraph& g, const WeightedGraph& h, double p,
                                 const ProbeSet& probes, double quality) {
  if (!(p > 0.0)) throw ArgumentError("estimate_quality: p must be positive");
  if (probes.size() == 0) throw ArgumentError("estimate_quality: empty probe set");
  if (g.vertex_count() != h.vertex_count())
    throw ValidationError("estimate_quality: graphs have different vertex counts");
  for (const Edge& e : h.edges()) {
    if (!g.has_edge(e.u, e.v)) {
      std::ostringstream os;
      os << "estimate_quality: edge (" << e.u << ", " << e.v << ") of H is not an edge of G";
      throw ValidationError(os.str());
    }
  }

  const auto count = static_cast<std::ptrdiff_t>(probes.size());
  std::vector<double> ratios(probes.size());
  parallel::for_blocks(count, 64, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    for (std::ptrdiff_t k = begin; k < end; ++k) {
      const Vector& x = probes.probes()[static_cast<std::size_t>(k)];
      ratios[static_cast<std::size_t>(k)] = p_energy(h, x, p) / p_energy(g, x, p);
    }
  });

  QualityEstimate out;
  out.probe_count = probes.size();
  out.min_ratio = out.max_ratio = ratios[0];
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    if (ratios[k] < out.min_ratio) {
      out.min_ratio = ratios[k];
      out.argmin = k;
    }
    if (ratios[k] > out.max_ratio) {
      out.max_ratio = ratios[k];
      out.argmax = k;
    }
  }
  out.lower_bound = out.min_ratio > 0.0 ? out.max_ratio / out.min_ratio
                                        : std::numeric_limits<double>::infinity();
  out.quality = quality > 0.0 ? quality : out.lower_bound;
  out.lambda_low = out.max_ratio / out.quality;
  out.lambda_high = out.min_ratio;
  return out;
}

double quality_lower_bound(const WeightedGraph& g, const WeightedGraph& h, double p,
                           const ProbeSet& probes) {
  return estimate_quality(g, h, p, probes).lower_bound;
}

CycleCounterexample cycle_counterexample(Index n, double p, double eps) {
  if (n < 3) throw ArgumentError("cycle_counterexample: n must be at least 3");
  if (!(p > 0.0)) throw ArgumentError("cycle_counterexample: p must be positive");
  if (!(eps > 0.0)) throw ArgumentError("cycle_counterexample: eps must be positive");

  CycleCounterexample out;
  out.path_weight = std::pow(static_cast<double>(n - 1), p - 1.0) / eps;
  std::vector<Edge> path;
  for (Index i = 0; i + 1 < n; ++i) path.push_back({i, i + 1, out.path_weight});
  std::vector<Edge> cycle = path;
  cycle.push_back({0, n - 1, 1.0});
  out.g = WeightedGraph(n, cycle);
  out.h = WeightedGraph(n, path);

  Vector ramp(n);
  for (Index i = 0; i < n; ++i) ramp(i) = static_cast<double>(i);
  Vector bump = Vector::Zero(n);
  bump(1) = 1.0;
  out.witnesses = {ramp, bump};
  out.p_guarantee_applies = p >= 1.0;
  return out;
}

double cycle_q_growth(Index n, double p, double q, double eps) {
  return eps * std::pow(static_cast<double>(n - 1), q - p);
}

double cycle_q_witness_bound(Index n, double p, double q, double eps) {
  return 1.0 + cycle_q_growth(n, p, q, eps);
}

MonotonicityReport monotonicity_check(const WeightedGraph& g, const WeightedGraph& h, double p,
                                      double q, const ProbeSet& probes, double quality) {
  if (!(q > 0.0 && q <= p)) throw ArgumentError("monotonicity_check: need 0 < q <= p");
  if (!(quality >= 1.0)) throw ArgumentError("monotonicity_check: quality must be >= 1");
  MonotonicityReport out;
  out.p = p;
  out.q = q;
  out.quality = quality;
  out.estimate = estimate_quality(g, h, q, probes, quality);
  if (out.estimate.lower_bound > quality + 1e-8) {
    std::ostringstream os;
    os << "monotonicity_check: q-quality lower bound " << out.estimate.lower_bound << " at q = " << q
       << " exceeds the p-quality " << quality << " (p = " << p << "), witness probe "
       << out.estimate.argmax;
    throw CertificationFailure(os.str());
  }
  return out;
}

}  // namespace rforge
