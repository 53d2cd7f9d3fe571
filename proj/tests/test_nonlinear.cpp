#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "rforge/error.hpp"
#include "rforge/nonlinear.hpp"

using namespace rforge;

namespace {

// Ratio of ratios on the two witnesses, from the oracle energy.
double witness_ratio(const CycleCounterexample& ce, double q) {
  double lo = 1e300, hi = 0.0;
  for (const Vector& x : ce.witnesses) {
    const double r = oracle::p_energy(ce.h, x, q) / oracle::p_energy(ce.g, x, q);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi / lo;
}

}  // namespace

TEST_CASE("p-energy matches the dense double sum") {
  const WeightedGraph g = oracle::random_graph(9, 0.5, 401);
  std::mt19937_64 rng(401);
  for (double p : {0.5, 1.0, 2.0, 3.0, 4.5}) {
    const Vector x = oracle::gaussian(rng, 9, 1);
    CHECK(p_energy(g, x, p) == doctest::Approx(oracle::p_energy(g, x, p)).epsilon(1e-13));
  }
  // Path 0-1-2 with unit weights, x = (0, 1, 3), p = 2: 2 (1 + 4) = 10.
  const WeightedGraph path(3, {{0, 1, 1}, {1, 2, 1}});
  Vector x(3);
  x << 0, 1, 3;
  CHECK(p_energy(path, x, 2.0) == doctest::Approx(10.0));
  CHECK(p_energy(path, x, 1.0) == doctest::Approx(6.0));
}

TEST_CASE("probe sets drop zero-energy configurations") {
  const WeightedGraph g(4, {{0, 1, 1}, {2, 3, 1}});
  Vector a(4), b(4), c(4);
  a << 1, 1, 1, 1;
  b << 2, 2, -1, -1;  // constant on both components
  c << 0, 1, 0, 0;
  const ProbeSet ps(g, {a, b, c});
  CHECK(ps.size() == 1);
  CHECK(ps.dropped() == 2);
  const auto r1 = random_probes(5, 10, 7);
  const auto r2 = random_probes(5, 10, 7);
  REQUIRE(r1.size() == 10);
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK((r1[i] - r2[i]).norm() == 0.0);
}

TEST_CASE("quality is invariant under scaling H") {
  const WeightedGraph g = oracle::random_graph(8, 0.6, 403);
  const ProbeSet ps(g, random_probes(8, 100, 11));
  for (double p : {1.0, 2.0, 3.0}) {
    const QualityEstimate q = estimate_quality(g, g.scaled(3.0), p, ps);
    CHECK(q.lower_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.min_ratio == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(q.lambda_low == doctest::Approx(q.lambda_high));
  }
  const QualityEstimate q = estimate_quality(g, g.scaled(2.0), 2.0, ps, 1.5);
  CHECK(q.lambda_low == doctest::Approx(2.0 / 1.5));
  CHECK(q.lambda_high == doctest::Approx(2.0));
}

TEST_CASE("estimate_quality argument checks") {
  const WeightedGraph path(3, {{0, 1, 1}, {1, 2, 1}});
  const WeightedGraph tri(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
  const ProbeSet ps(path, random_probes(3, 5, 1));
  CHECK_THROWS_AS(estimate_quality(path, tri, 2.0, ps), ValidationError);
  CHECK_THROWS_AS(estimate_quality(path, path, 0.0, ps), ArgumentError);
  CHECK_THROWS_AS(estimate_quality(path, path, 2.0, ProbeSet(path, {})), ArgumentError);
}

TEST_CASE("cycle pair: construction and witness values") {
  const CycleCounterexample ce = cycle_counterexample(5, 2.0, 0.5);
  CHECK(ce.path_weight == doctest::Approx(8.0));  // 4^1 / 0.5
  CHECK(ce.g.edge_count() == 5);
  CHECK(ce.h.edge_count() == 4);
  CHECK(ce.g.weight(0, 4) == 1.0);
  CHECK_FALSE(ce.h.has_edge(0, 4));
  CHECK(ce.p_guarantee_applies);
  // Ramp energy: unit edge 2 * 4^2 = 32, path edges 2 * 8 * 4 = 64.
  CHECK(p_energy(ce.g, ce.witnesses[0], 2.0) == doctest::Approx(96.0));
  CHECK(p_energy(ce.h, ce.witnesses[0], 2.0) == doctest::Approx(64.0));

  // p-quality on the witnesses is exactly 1 + eps.
  CHECK(witness_ratio(ce, 2.0) == doctest::Approx(1.5).epsilon(1e-12));
  // q-quality grows as 1 + eps (n-1)^{q-p}.
  for (double q : {3.0, 4.0, 5.0}) {
    const double expect = 1.0 + 0.5 * std::pow(4.0, q - 2.0);
    CHECK(witness_ratio(ce, q) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(cycle_q_witness_bound(5, 2.0, q, 0.5) == doctest::Approx(expect));
    CHECK(cycle_q_growth(5, 2.0, q, 0.5) == doctest::Approx(expect - 1.0));
  }
  CHECK(cycle_q_growth(5, 2.0, 4.0, 0.5) == doctest::Approx(8.0));
  CHECK(cycle_q_growth(5, 2.0, 5.0, 0.5) == doctest::Approx(32.0));
  CHECK(cycle_q_growth(5, 2.0, 6.0, 0.5) == doctest::Approx(128.0));

  CHECK_THROWS_AS(cycle_counterexample(2, 2.0, 0.5), ArgumentError);
  CHECK_THROWS_AS(cycle_counterexample(5, 0.0, 0.5), ArgumentError);
  CHECK_THROWS_AS(cycle_counterexample(5, 2.0, 0.0), ArgumentError);
}

TEST_CASE("cycle pair is a (1+eps) p-sparsifier on random probes") {
  for (Index n : {4, 6, 9}) {
    for (double p : {1.0, 2.0, 3.0}) {
      const double eps = 0.4;
      const CycleCounterexample ce = cycle_counterexample(n, p, eps);
      std::vector<Vector> cand = random_probes(n, 300, 13);
      cand.insert(cand.end(), ce.witnesses.begin(), ce.witnesses.end());
      const ProbeSet ps(ce.g, cand);
      const QualityEstimate q = estimate_quality(ce.g, ce.h, p, ps);
      CHECK(q.lower_bound <= 1.0 + eps + 1e-9);
      CHECK(q.lower_bound == doctest::Approx(1.0 + eps).epsilon(1e-12));
    }
  }
}

TEST_CASE("below p = 1 the cycle guarantee is flagged") {
  const CycleCounterexample ce = cycle_counterexample(6, 0.5, 0.5);
  CHECK_FALSE(ce.p_guarantee_applies);
  // A single jump at vertex 0 against the ramp: the ratio of ratios exceeds 1 + eps.
  Vector spike = Vector::Ones(6);
  spike(0) = 0.0;
  const ProbeSet ps(ce.g, {ce.witnesses[0], ce.witnesses[1], spike});
  CHECK(estimate_quality(ce.g, ce.h, 0.5, ps).lower_bound > 1.5);
}

TEST_CASE("monotonicity for q <= p") {
  const double eps = 0.5;
  const CycleCounterexample ce = cycle_counterexample(6, 4.0, eps);
  std::vector<Vector> cand = random_probes(6, 300, 17);
  cand.insert(cand.end(), ce.witnesses.begin(), ce.witnesses.end());
  const ProbeSet ps(ce.g, cand);
  for (double q : {1.0, 2.0, 3.0, 4.0}) {
    const MonotonicityReport r = monotonicity_check(ce.g, ce.h, 4.0, q, ps, 1.0 + eps);
    CHECK(r.estimate.lower_bound <= 1.0 + eps + 1e-8);
  }
  // A claimed quality that is too small is rejected.
  CHECK_THROWS_AS(monotonicity_check(ce.g, ce.h, 4.0, 4.0, ps, 1.01), CertificationFailure);
  CHECK_THROWS_AS(monotonicity_check(ce.g, ce.h, 2.0, 4.0, ps, 1.5), ArgumentError);
}

TEST_CASE("p = 2 quality agrees with the spectral certificate") {
  const WeightedGraph g = oracle::random_graph(10, 0.7, 405);
  const GraphSparsifyResult s = sparsify_graph(g, 0.6);
  const QualityReport cert = verify_quality(g, s.graph);
  const ProbeSet ps(g, random_probes(10, 400, 19));
  const QualityEstimate q = estimate_quality(g, s.graph, 2.0, ps);
  const double spectral = cert.max_quotient / cert.min_quotient;
  CHECK(q.lower_bound <= spectral * (1 + 1e-9));
  CHECK(q.min_ratio >= cert.min_quotient * (1 - 1e-9));
  CHECK(q.max_ratio <= cert.max_quotient * (1 + 1e-9));
}
