#pragma once

// Weighted graphs, Laplacians and spectral sparsification of graphs.

#include "rforge/bss.hpp"
#include "rforge/linalg.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rforge {

struct Edge {
  Index u;  // u < v
  Index v;
  double w;  // > 0
};

/// Undirected graph on vertices 0..n-1 with positive edge weights, at most one
/// edge per unordered pair. Edges keep their insertion order.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Validates edges and canonicalizes each pair to u < v. Self-loops are
  /// dropped (a note is appended to `warnings` when given); duplicate pairs,
  /// out-of-range endpoints and nonpositive or non-finite weights throw
  /// ValidationError.
  WeightedGraph(Index n, const std::vector<Edge>& edges,
                std::vector<std::string>* warnings = nullptr);

  Index vertex_count() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  /// Nonzero entries of the symmetric weight matrix (2 per edge).
  std::size_t ordered_support() const noexcept { return 2 * edges_.size(); }

  /// Weight of {u, v}, 0 when absent.
  double weight(Index u, Index v) const;
  bool has_edge(Index u, Index v) const { return weight(u, v) != 0.0; }

  /// Symmetric weighted adjacency matrix, zero diagonal.
  Matrix adjacency() const;
  WeightedGraph scaled(double factor) const;

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
  std::map<std::pair<Index, Index>, std::size_t> index_;
};

/// Delta_G = D_G - G.
SymmetricMatrix laplacian(const WeightedGraph& g);

/// One column sqrt(w) (e_u - e_v) per edge, in edge order.
Frame edge_frame(const WeightedGraph& g);

struct GraphSparsifyResult {
  WeightedGraph graph;
  SparsifyResult frame_result;
  /// Edge weights are s_e g_e / lambda_min so that the lower constant is 1.
  double quotient_upper_bound = 0.0;  // ((1+eps)/(1-eps))^2
};

/// Sparsifies g: supp(H) is a subset of supp(G), the ordered support is at
/// most 2 ceil(n/eps^2), and on the range of Delta_G
///   <Delta_G y, y> <= <Delta_H y, y> <= ((1+eps)/(1-eps))^2 <Delta_G y, y>.
GraphSparsifyResult sparsify_graph(const WeightedGraph& g, double eps,
                                   const SparsifyOptions& options = {});

struct QualityReport {
  double min_quotient = 0.0;
  double max_quotient = 0.0;
  Index range_dim = 0;
  Index kernel_dim = 0;
  std::size_t g_ordered_support = 0;
  std::size_t h_ordered_support = 0;
};

/// Certifies the generalized Rayleigh quotients <Delta_H y,y>/<Delta_G y,y> on
/// the orthogonal complement of ker(Delta_G). Independent of the construction
/// path: uses Eigen's dense symmetric and generalized-definite solvers.
/// Throws CertificationFailure naming a witness edge when supp(H) is not a
/// subset of supp(G) or a witness vector when ker(Delta_G) is not in ker(Delta_H).
QualityReport verify_quality(const WeightedGraph& g, const WeightedGraph& h);

struct SpectralGapReport {
  double ratio = 0.0;        // (lambda_1 - lambda_n) / (lambda_1 - lambda_2)
  double lambda_1 = 0.0;
  double lambda_2 = 0.0;
  double lambda_n = 0.0;
  double average_degree = 0.0;
  /// 1 + 4/sqrt(d) with d the average degree; the Ramanujan-graph benchmark.
  double ramanujan_benchmark = 0.0;
};

/// Spectral-gap ratio of the weighted adjacency matrix. Throws ValidationError
/// for fewer than two vertices or when lambda_1 - lambda_2 <= 1e-12.
SpectralGapReport spectral_gap_report(const WeightedGraph& h);
double spectral_gap_ratio(const WeightedGraph& h);

}  // namespace rforge
