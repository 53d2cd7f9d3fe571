#include "rforge/graph.hpp"

#include "rforge/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rforge {

WeightedGraph::WeightedGraph(Index n, const std::vector<Edge>& edges,
                             std::vector<std::string>* warnings)
    : n_(n) {
  if (n < 1) throw ValidationError("WeightedGraph: vertex count must be >= 1");
  edges_.reserve(edges.size());
  for (const Edge& raw : edges) {
    if (raw.u < 0 || raw.v < 0 || raw.u >= n || raw.v >= n) {
      std::ostringstream os;
      os << "WeightedGraph: edge (" << raw.u << ", " << raw.v << ") out of range for n = " << n;
      throw ValidationError(os.str());
    }
    if (!std::isfinite(raw.w) || !(raw.w > 0.0)) {
      std::ostringstream os;
      os << "WeightedGraph: edge (" << raw.u << ", " << raw.v << ") has weight " << raw.w
         << "; weights must be positive and finite";
      throw ValidationError(os.str());
    }
    if (raw.u == raw.v) {
      if (warnings) warnings->push_back("ignored self-loop at vertex " + std::to_string(raw.u));
      continue;
    }
    Edge e{std::min(raw.u, raw.v), std::max(raw.u, raw.v), raw.w};
    if (!index_.emplace(std::make_pair(e.u, e.v), edges_.size()).second) {
      std::ostringstream os;
      os << "WeightedGraph: duplicate edge (" << e.u << ", " << e.v << ")";
      throw ValidationError(os.str());
    }
    edges_.push_back(e);
  }
}

double WeightedGraph::weight(Index u, Index v) const {
  const auto it = index_.find({std::min(u, v), std::max(u, v)});
  return it == index_.end() ? 0.0 : edges_[it->second].w;
}

Matrix WeightedGraph::adjacency() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (const Edge& e : edges_) {
    a(e.u, e.v) = e.w;
    a(e.v, e.u) = e.w;
  }
  return a;
}

WeightedGraph WeightedGraph::scaled(double factor) const {
  std::vector<Edge> out = edges_;
  for (Edge& e : out) e.w *= factor;
  return WeightedGraph(n_, out);
}

SymmetricMatrix laplacian(const WeightedGraph& g) {
  Matrix l = Matrix::Zero(g.vertex_count(), g.vertex_count());
  for (const Edge& e : g.edges()) {
    l(e.u, e.u) += e.w;
    l(e.v, e.v) += e.w;
    l(e.u, e.v) -= e.w;
    l(e.v, e.u) -= e.w;
  }
  return SymmetricMatrix::from_dense(l, 0.0);
}

Frame edge_frame(const WeightedGraph& g) {
  Matrix x = Matrix::Zero(g.vertex_count(), static_cast<Index>(g.edge_count()));
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const Edge& e = g.edges()[k];
    const double r = std::sqrt(e.w);
    x(e.u, static_cast<Index>(k)) = r;
    x(e.v, static_cast<Index>(k)) = -r;
  }
  return Frame(g.vertex_count(), std::move(x));
}

GraphSparsifyResult sparsify_graph(const WeightedGraph& g, double eps,
                                   const SparsifyOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("sparsify_graph: eps must lie in (0,1)");
  GraphSparsifyResult out;
  const double theta = bss_theta(eps);
  out.quotient_upper_bound = theta * theta;
  if (g.edge_count() == 0) {
    out.graph = g;
    return out;
  }
  out.frame_result = sparsify_frame(edge_frame(g), eps, options);

  // Frame weights put the spectrum in [(1-eps)^2, ...]; lift the lower end to 1.
  const double lift = 1.0 / ((1.0 - eps) * (1.0 - eps));
  std::vector<Edge> kept;
  kept.reserve(out.frame_result.weights.support());
  for (const auto& [idx, s] : out.frame_result.weights.weights) {
    const Edge& e = g.edges()[static_cast<std::size_t>(idx)];
    kept.push_back({e.u, e.v, e.w * s * lift});
  }
  out.graph = WeightedGraph(g.vertex_count(), kept);
  return out;
}

QualityReport verify_quality(const WeightedGraph& g, const WeightedGraph& h) {
  if (g.vertex_count() != h.vertex_count())
    throw ArgumentError("verify_quality: graphs have different vertex counts");
  for (const Edge& e : h.edges()) {
    if (!g.has_edge(e.u, e.v)) {
      std::ostringstream os;
      os << "verify_quality: support violation, edge (" << e.u << ", " << e.v
         << ") of H is not an edge of G";
      throw CertificationFailure(os.str());
    }
  }

  QualityReport rep;
  rep.g_ordered_support = g.ordered_support();
  rep.h_ordered_support = h.ordered_support();

  const Matrix lg = laplacian(g).dense();
  const Matrix lh = laplacian(h).dense();
  Eigen::SelfAdjointEigenSolver<Matrix> split(lg);
  if (split.info() != Eigen::Success)
    throw CertificationFailure("verify_quality: eigensolver failed on Delta_G");
  const Vector& vals = split.eigenvalues();  // ascending
  const double top = std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  const double kernel_tol = 1e-9 * top;
  Index kdim = 0;
  while (kdim < vals.size() && vals(kdim) <= kernel_tol) ++kdim;
  rep.kernel_dim = kdim;
  rep.range_dim = vals.size() - kdim;

  const double lh_scale = std::max(1.0, lh.cwiseAbs().maxCoeff());
  for (Index k = 0; k < kdim; ++k) {
    const Vector v = split.eigenvectors().col(k);
    const double leak = (lh * v).norm();
    if (leak > 1e-8 * lh_scale) {
      std::ostringstream os;
      os << "verify_quality: kernel violation, ||Delta_H v|| = " << leak << " for v = ["
         << v.transpose() << "] in ker(Delta_G)";
      throw CertificationFailure(os.str());
    }
  }

  if (rep.range_dim == 0) {
    rep.min_quotient = rep.max_quotient = 1.0;
    return rep;
  }
  const Matrix u = split.eigenvectors().rightCols(rep.range_dim);
  Matrix gp = u.transpose() * lg * u;
  Matrix hp = u.transpose() * lh * u;
  gp = 0.5 * (gp + gp.transpose()).eval();
  hp = 0.5 * (hp + hp.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> pencil(hp, gp, Eigen::EigenvaluesOnly);
  if (pencil.info() != Eigen::Success)
    throw CertificationFailure("verify_quality: generalized eigensolver failed");
  rep.min_quotient = pencil.eigenvalues().minCoeff();
  rep.max_quotient = pencil.eigenvalues().maxCoeff();
  return rep;
}

SpectralGapReport spectral_gap_report(const WeightedGraph& h) {
  const Index n = h.vertex_count();
  if (n < 2) throw ValidationError("spectral_gap_ratio: graph needs at least two vertices");
  const EigenDecomposition eig = eigh(SymmetricMatrix::from_dense(h.adjacency(), 0.0));
  SpectralGapReport r;
  r.lambda_1 = eig.values(0);
  r.lambda_2 = eig.values(1);
  r.lambda_n = eig.values(n - 1);
  const double gap = r.lambda_1 - r.lambda_2;
  if (!(gap > 1e-12)) {
    std::ostringstream os;
    os << "spectral_gap_ratio: degenerate spectrum (lambda_1 - lambda_2 = " << gap
       << "); graph is disconnected or trivial";
    throw ValidationError(os.str());
  }
  r.ratio = (r.lambda_1 - r.lambda_n) / gap;
  r.average_degree = static_cast<double>(h.ordered_support()) / static_cast<double>(n);
  r.ramanujan_benchmark =
      r.average_degree > 0 ? 1.0 + 4.0 / std::sqrt(r.average_degree) : 0.0;
  return r;
}

double spectral_gap_ratio(const WeightedGraph& h) { return spectral_gap_report(h).ratio; }

}  // namespace rforge
