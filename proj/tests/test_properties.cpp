#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "rforge/cli.hpp"
#include "rforge/embeddings.hpp"
#include "rforge/error.hpp"
#include "rforge/io.hpp"
#include "rforge/nonlinear.hpp"
#include "rforge/parallel.hpp"
#include "rforge/restricted_invertibility.hpp"

#include <sstream>

using namespace rforge;

namespace {

// Seeded generator of random instances; each property runs over many seeds.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed * 0x9E3779B97F4A7C15ULL + 1) {}

  Index size(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
  }
  double real(double lo, double hi) { return oracle::uniform(rng, lo, hi); }
  Matrix gaussian(Index r, Index c) { return oracle::gaussian(rng, r, c); }
  Matrix symmetric(Index n) {
    const Matrix g = gaussian(n, n) * real(0.1, 10.0);
    return 0.5 * (g + g.transpose());
  }
  Matrix spd(Index n) {
    const Matrix g = gaussian(n, n);
    return g * g.transpose() + real(0.5, 2.0) * Matrix::Identity(n, n);
  }
  WeightedGraph graph(Index n) { return oracle::random_graph(n, real(0.2, 1.0), rng()); }
  double eps() {
    static const double choices[] = {0.3, 0.5, 0.7, 0.9};
    return choices[size(0, 3)];
  }
};

constexpr int kTrials = 100;

}  // namespace

TEST_CASE("eigh reconstructs its input") {
  for (int s = 0; s < kTrials; ++s) {
    Gen g(s);
    const Matrix m = g.symmetric(g.size(1, 16));
    const EigenDecomposition e = eigh(SymmetricMatrix::from_dense(m));
    CHECK((e.reconstruct() - m).cwiseAbs().maxCoeff() <= 1e-10 * (1 + m.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("Sherman-Morrison update and trace identity") {
  for (int s = 0; s < kTrials; ++s) {
    Gen g(1000 + s);
    const Index n = g.size(1, 16);
    const Matrix m = g.spd(n);
    const Matrix m_inv = m.inverse();
    const Vector z = g.gaussian(n, 1);
    const SymmetricMatrix up =
        sherman_morrison_inverse_update(SymmetricMatrix::from_dense(0.5 * (m_inv + m_inv.transpose())), z);
    const Matrix updated = m + z * z.transpose();
    CHECK((up.dense() * updated - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    const Vector mz = m_inv * z;
    const double tr = trace_after_rank_one(m_inv.trace(), mz, mz.squaredNorm(), z);
    CHECK(oracle::rel_diff(tr, updated.inverse().trace()) <= 1e-10);
  }
}

TEST_CASE("isotropic reduction whitens and preserves quadratic forms") {
  for (int s = 0; s < kTrials; ++s) {
    Gen g(2000 + s);
    const Index n = g.size(1, 8);
    const Index r = g.size(1, n);
    const Index m = g.size(r, 3 * n);
    const Matrix x = g.gaussian(n, r) * g.gaussian(r, m);
    const IsotropicReduction red = isotropic_reduce(Frame(x));
    const Matrix y = red.frame.vectors();
    CHECK(red.map.rank() == r);
    CHECK((y * y.transpose() - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() <= 1e-8);
    const Vector w = x * g.gaussian(m, 1);  // in the range
    const double lhs = (x.transpose() * w).squaredNorm();
    const double rhs = (y.transpose() * red.map.to_reduced(w)).squaredNorm();
    CHECK(oracle::rel_diff(lhs, rhs) <= 1e-8);
  }
}

TEST_CASE("frame sparsification invariants on random frames") {
  for (int s = 0; s < 40; ++s) {
    Gen g(3000 + s);
    const Index n = g.size(1, 6);
    const Index m = g.size(n, 40);
    const double eps = g.eps();
    const Matrix x = g.gaussian(n, m);
    SparsifyOptions opt;
    bool ok = true;
    opt.observer = [&](const StepRecord& r) {
      const double theta = bss_theta(eps);
      ok = ok && r.lambda_min > r.lower_barrier && r.lambda_max < r.upper_barrier;
      ok = ok && std::abs(r.upper_potential - eps / theta) <= 1e-8 * eps / theta;
      ok = ok && r.lower_potential <= r.previous_lower_potential + 1e-9 && r.lower_potential <= eps + 1e-8;
      ok = ok && r.beta_sum >= r.alpha_sum - 1e-9;
      ok = ok && r.alpha_sum <= 1 - eps + 1e-8 && r.beta_sum >= 1 - eps - 1e-8;
    };
    const SparsifyResult res = sparsify_frame(Frame(x), eps, opt);
    CHECK(ok);
    CHECK(static_cast<long>(res.weights.support()) <= bss_iteration_count(res.reduced_dim, eps));
    const auto [lo, hi] = oracle::pencil_range(
        x * res.weights.dense().asDiagonal() * x.transpose(), x * x.transpose());
    CHECK(lo >= (1 - eps) * (1 - eps) - 1e-8);
    CHECK(hi <= (1 + eps) * (1 + eps) + 1e-8);
  }
}

TEST_CASE("frame sparsification does not depend on the thread count") {
  for (int s = 0; s < 5; ++s) {
    Gen g(3500 + s);
    const Matrix x = oracle::random_isotropic(g.rng, 6, 300);
    parallel::set_thread_limit(1);
    const SparsifyResult a = sparsify_frame(Frame::certified(x), 0.5);
    parallel::set_thread_limit(4);
    const SparsifyResult b = sparsify_frame(Frame::certified(x), 0.5);
    parallel::set_thread_limit(0);
    CHECK(a.weights.weights == b.weights.weights);
  }
}

TEST_CASE("Laplacian quadratic form and edge frame") {
  for (int s = 0; s < 20; ++s) {
    Gen g(4000 + s);
    const Index n = g.size(2, 12);
    const WeightedGraph gr = g.graph(n);
    const Matrix l = laplacian(gr).dense();
    const Matrix f = edge_frame(gr).vectors();
    CHECK((f * f.transpose() - l).cwiseAbs().maxCoeff() <= 1e-10);
    for (int t = 0; t < 100; ++t) {
      const Vector y = g.gaussian(n, 1);
      double half_sum = 0.0;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) half_sum += 0.5 * gr.weight(i, j) * std::pow(y(i) - y(j), 2);
      CHECK(oracle::rel_diff(y.dot(l * y), half_sum) <= 1e-10);
    }
  }
}

TEST_CASE("graph sparsifiers: support and sandwich") {
  for (int s = 0; s < 25; ++s) {
    Gen g(5000 + s);
    const Index n = g.size(2, 20);
    const double eps = g.eps();
    const WeightedGraph gr = g.graph(n);
    const GraphSparsifyResult res = sparsify_graph(gr, eps);
    CHECK(static_cast<long>(res.graph.ordered_support()) <= 2 * bss_iteration_count(n, eps));
    for (const Edge& e : res.graph.edges()) CHECK(gr.has_edge(e.u, e.v));
    const auto [lo, hi] = oracle::pencil_range(oracle::laplacian(res.graph), oracle::laplacian(gr));
    const double theta = bss_theta(eps);
    CHECK(lo >= 1 - 1e-8);
    CHECK(hi <= theta * theta + 1e-8);
  }
}

TEST_CASE("restricted invertibility lower bound on random combinations") {
  for (int s = 0; s < 30; ++s) {
    Gen g(6000 + s);
    const Index n = g.size(4, 12);
    const double eps = g.size(0, 1) ? 0.5 : 0.8;
    const Matrix t = oracle::operator_with_flat_spectrum(g.rng, n, g.real(0.3, 0.9));
    const RiResult r = ri_select(Frame::standard_basis(n), t, eps);
    CHECK(r.k == static_cast<long>(std::floor(eps * eps * r.hs_sq / r.op_sq + 1e-12)));
    for (const RiStepRecord& st : r.steps) {
      CHECK(st.eigenvalues_above_barrier == st.step);
      CHECK(st.potential < st.previous_potential + 1e-9 * std::abs(st.previous_potential));
      CHECK(st.previous_potential < -static_cast<double>(n) / (1 - eps) + 1e-8);
    }
    const double floor = (1 - eps) * (1 - eps) * r.hs_sq / static_cast<double>(n);
    for (int trial = 0; trial < 100 && r.k > 0; ++trial) {
      const Vector a = g.gaussian(r.k, 1);
      Vector v = Vector::Zero(t.rows());
      for (Index c = 0; c < r.k; ++c) v += a(c) * t.col(r.sigma[c]);
      CHECK(v.squaredNorm() >= floor * a.squaredNorm() - 1e-8);
    }
  }
}

TEST_CASE("cut decompositions and l1 embeddings") {
  for (int s = 0; s < 20; ++s) {
    Gen g(7000 + s);
    const Index n = g.size(2, 12);
    const Index d = g.size(1, 4);
    Matrix pts = g.gaussian(n, d);
    if (g.size(0, 3) == 0) pts.row(n - 1) = pts.row(0);  // coincident points
    const CutDecomposition cd = cut_decompose(pts);
    CHECK(static_cast<Index>(cd.cuts.size()) <= d * (n - 1));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        CHECK(std::abs(cd.distance(i, j) - oracle::l1(pts, i, j)) <=
              1e-12 * std::max(1.0, oracle::l1(pts, i, j)));
    const double eps = g.eps();
    const L1Embedding e = embed_l1(pts, eps);
    CHECK(e.target_dim() <= e.dimension_bound);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double src = oracle::l1(pts, i, j);
        const double dst = oracle::l1(e.points, i, j);
        if (src == 0.0) {
          CHECK(dst == 0.0);
          continue;
        }
        CHECK(dst / src >= 1 - 1e-8);
        CHECK(dst / src <= 1 + eps + 1e-8);
      }
  }
}

TEST_CASE("even-p embeddings are certified on all of X") {
  for (int s = 0; s < 10; ++s) {
    Gen g(8000 + s);
    const Index n = g.size(1, 3);
    const int p = g.size(0, 1) ? 4 : 6;
    const Matrix basis = g.gaussian(n, g.size(8, 30));
    const double eps = g.eps();
    const LpEmbedding e = embed_lp_even(basis, p, eps);
    CHECK(e.certified_min >= 1 - 1e-8);
    CHECK(e.certified_max <= 1 + eps * p / 4.0 + 1e-8);
    for (int t = 0; t < 50; ++t) {
      const Vector x = basis.transpose() * g.gaussian(n, 1);
      const double r = e.distortion(x);
      CHECK(r >= 1 - 1e-9);
      CHECK(r <= std::pow(1 + eps * p / 4.0, 1.0 / p) + 1e-9);
    }
  }
}

TEST_CASE("approximate John decompositions") {
  for (int s = 0; s < 10; ++s) {
    Gen g(9000 + s);
    const Index n = g.size(1, 4);
    Matrix pts;
    Vector w;
    oracle::random_john(g.rng, n, g.size(n, 30), pts, w);
    const double eps = g.size(0, 1) ? 0.6 : 0.9;
    const JohnApproximation ja = approximate_john({pts, w}, eps);
    const JohnDecomposition& out = ja.decomposition;
    CHECK(out.identity_residual() <= 1e-8);
    CHECK(out.center_of_mass().cwiseAbs().maxCoeff() == 0.0);
    for (Index c = 0; c < out.size(); ++c) CHECK(std::abs(out.points.col(c).norm() - 1) <= 1e-10);
    CHECK(static_cast<long>(ja.support.size()) <= ja.support_bound);
    CHECK(ja.a_deviation <= eps / 4 + 1e-8);
  }
}

TEST_CASE("p-quality: scale invariance, spectral consistency, cycle growth") {
  for (int s = 0; s < 15; ++s) {
    Gen g(10000 + s);
    const Index n = g.size(3, 10);
    const WeightedGraph gr = g.graph(n);
    const ProbeSet ps(gr, random_probes(n, 100, g.rng()));
    const double p = g.real(0.5, 5.0);
    const GraphSparsifyResult sp = sparsify_graph(gr, g.eps());
    const double base = quality_lower_bound(gr, sp.graph, p, ps);
    const double scaled = quality_lower_bound(gr, sp.graph.scaled(g.real(1e-3, 1e3)), p, ps);
    CHECK(oracle::rel_diff(base, scaled) <= 1e-10);

    const QualityReport q = verify_quality(gr, sp.graph);
    CHECK(quality_lower_bound(gr, sp.graph, 2.0, ps) <= q.max_quotient / q.min_quotient + 1e-8);
  }
  const double eps = 0.5;
  for (double q : {3.0, 4.0, 6.0}) {
    double prev = 0.0;
    for (Index n = 3; n <= 17; ++n) {
      const CycleCounterexample ce = cycle_counterexample(n, 2.0, eps);
      const double b = quality_lower_bound(ce.g, ce.h, q, ProbeSet(ce.g, ce.witnesses));
      CHECK(b > prev);
      CHECK(b >= cycle_q_growth(n, 2.0, q, eps));
      prev = b;
    }
  }
}

TEST_CASE("serialization round-trips") {
  for (int s = 0; s < 30; ++s) {
    Gen g(11000 + s);
    const WeightedGraph gr = g.graph(g.size(2, 15));
    std::ostringstream out;
    io::write_edge_list(out, gr);
    std::istringstream in(out.str());
    const WeightedGraph back = io::read_edge_list(in);
    REQUIRE(back.edge_count() == gr.edge_count());
    for (std::size_t e = 0; e < gr.edge_count(); ++e) CHECK(back.edges()[e].w == gr.edges()[e].w);

    const Matrix m = g.gaussian(g.size(1, 6), g.size(1, 6)) * std::pow(10.0, g.real(-200, 200));
    std::ostringstream mo;
    io::write_matrix(mo, m);
    std::istringstream mi(mo.str());
    CHECK((io::read_matrix(mi) - m).cwiseAbs().maxCoeff() == 0.0);
  }
}
