#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "rforge/error.hpp"
#include "rforge/graph.hpp"

using namespace rforge;

TEST_CASE("graph construction canonicalizes and validates") {
  std::vector<std::string> warnings;
  const WeightedGraph g(4, {{2, 1, 1.5}, {3, 3, 2.0}, {0, 3, 0.5}}, &warnings);
  CHECK(g.edge_count() == 2);
  CHECK(g.edges()[0].u == 1);
  CHECK(g.edges()[0].v == 2);
  CHECK(g.weight(2, 1) == 1.5);
  CHECK(g.weight(0, 1) == 0.0);
  CHECK(g.ordered_support() == 4);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("self-loop") != std::string::npos);

  CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph(3, {{0, 3, 1.0}}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 0.0}}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, -1.0}}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph(0, {}), ValidationError);
}

TEST_CASE("Laplacian and edge frame agree with the definition") {
  const WeightedGraph g = oracle::random_graph(7, 0.6, 5);
  const Matrix l = laplacian(g).dense();
  CHECK((l - oracle::laplacian(g)).cwiseAbs().maxCoeff() < 1e-15);
  const Frame f = edge_frame(g);
  CHECK(f.size() == static_cast<Index>(g.edge_count()));
  CHECK((f.vectors() * f.vectors().transpose() - l).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((l * Vector::Ones(7)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single edge: support 2 and quality [1, 1]") {
  const WeightedGraph g(2, {{0, 1, 1.5}});
  const GraphSparsifyResult res = sparsify_graph(g, 0.5);
  CHECK(res.graph.ordered_support() == 2);
  const QualityReport q = verify_quality(g, res.graph);
  CHECK(q.min_quotient == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.max_quotient == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.kernel_dim == 1);
}

TEST_CASE("sparsifier certificate on random graphs, checked by an oracle pencil") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Index n = 6 + static_cast<Index>(seed) * 2;
    const double eps = seed % 2 ? 0.5 : 0.8;
    const WeightedGraph g = oracle::random_graph(n, 0.7, seed);
    const GraphSparsifyResult res = sparsify_graph(g, eps);
    const double theta = bss_theta(eps);
    CHECK(static_cast<long>(res.graph.ordered_support()) <= 2 * bss_iteration_count(n, eps));
    for (const Edge& e : res.graph.edges()) CHECK(g.has_edge(e.u, e.v));

    const QualityReport q = verify_quality(g, res.graph);
    const auto [lo, hi] = oracle::pencil_range(oracle::laplacian(res.graph), oracle::laplacian(g));
    CHECK(q.min_quotient >= 1.0 - 1e-8);
    CHECK(q.max_quotient <= theta * theta + 1e-8);
    CHECK(lo == doctest::Approx(q.min_quotient).epsilon(1e-8));
    CHECK(hi == doctest::Approx(q.max_quotient).epsilon(1e-8));
  }
}

TEST_CASE("disconnected graphs keep the kernel") {
  // Two triangles.
  const WeightedGraph g(6, {{0, 1, 1}, {1, 2, 2}, {0, 2, 1}, {3, 4, 1}, {4, 5, 3}, {3, 5, 1}});
  const GraphSparsifyResult res = sparsify_graph(g, 0.6);
  const QualityReport q = verify_quality(g, res.graph);
  CHECK(q.kernel_dim == 2);
  CHECK(q.range_dim == 4);
  CHECK(q.min_quotient >= 1.0 - 1e-8);
  CHECK(q.max_quotient <= 16.0 + 1e-8);
}

TEST_CASE("graph without edges sparsifies to itself") {
  const WeightedGraph g(3, {});
  const GraphSparsifyResult res = sparsify_graph(g, 0.5);
  CHECK(res.graph.edge_count() == 0);
  const QualityReport q = verify_quality(g, res.graph);
  CHECK(q.range_dim == 0);
}

TEST_CASE("verify_quality rejects support and kernel violations") {
  const WeightedGraph path(3, {{0, 1, 1}, {1, 2, 1}});
  const WeightedGraph tri(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
  CHECK_THROWS_AS(verify_quality(path, tri), CertificationFailure);
  try {
    verify_quality(path, tri);
  } catch (const CertificationFailure& e) {
    CHECK(std::string(e.what()).find("(0, 2)") != std::string::npos);
  }
  const WeightedGraph split(4, {{0, 1, 1}, {2, 3, 1}});
  CHECK_THROWS_AS(verify_quality(split, WeightedGraph(3, {})), ArgumentError);
  // h = g and h = 3g.
  const QualityReport same = verify_quality(tri, tri);
  CHECK(same.min_quotient == doctest::Approx(1.0));
  CHECK(same.max_quotient == doctest::Approx(1.0));
  const QualityReport scaled = verify_quality(tri, tri.scaled(3.0));
  CHECK(scaled.min_quotient == doctest::Approx(3.0));
  CHECK(scaled.max_quotient == doctest::Approx(3.0));
}

TEST_CASE("spectral gap ratio") {
  // Complete graph K_4: eigenvalues 3, -1, -1, -1 so the ratio is 1.
  std::vector<Edge> k4;
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) k4.push_back({i, j, 1.0});
  const SpectralGapReport r = spectral_gap_report(WeightedGraph(4, k4));
  CHECK(r.ratio == doctest::Approx(1.0));
  CHECK(r.average_degree == doctest::Approx(3.0));
  CHECK(r.ramanujan_benchmark == doctest::Approx(1.0 + 4.0 / std::sqrt(3.0)));

  // 4-cycle: eigenvalues 2, 0, 0, -2; ratio 4/2.
  const WeightedGraph c4(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}});
  CHECK(spectral_gap_ratio(c4) == doctest::Approx(2.0));

  CHECK_THROWS_AS(spectral_gap_ratio(WeightedGraph(1, {})), ValidationError);
  // Disconnected: lambda_1 = lambda_2.
  CHECK_THROWS_AS(spectral_gap_ratio(WeightedGraph(4, {{0, 1, 1}, {2, 3, 1}})), ValidationError);
}
