#include "rforge/cli.hpp"

#include "rforge/bss.hpp"
#include "rforge/embeddings.hpp"
#include "rforge/error.hpp"
#include "rforge/graph.hpp"
#include "rforge/io.hpp"
#include "rforge/restricted_invertibility.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace rforge::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTol = 1e-8;

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::kSparsifyGraph, "sparsify-graph"}, {Command::kSparsifyFrame, "sparsify-frame"},
    {Command::kRiSelect, "ri-select"},           {Command::kEmbedL1, "embed-l1"},
    {Command::kEmbedLp, "embed-lp"},             {Command::kJohnApprox, "john-approx"},
    {Command::kVerify, "verify"},                {Command::kCycleDemo, "cycle-demo"},
};

void require_eps(const RunConfig& c) {
  if (!(c.eps > 0.0 && c.eps < 1.0)) {
    std::ostringstream os;
    os << "eps must lie in (0,1), got " << c.eps;
    throw ArgumentError(os.str());
  }
}

void require_path(const std::string& path, const char* what) {
  if (path.empty()) throw ArgumentError(std::string("missing ") + what + " path");
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json indices_json(const std::vector<Index>& v) {
  json a = json::array();
  for (Index i : v) a.push_back(i);
  return a;
}

json strings_json(const std::vector<std::string>& v) {
  json a = json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

// Extreme eigenvalues of sum s_i x_i x_i^T relative to sum x_i x_i^T on the
// range of the latter. Uses Eigen's solver, not the construction path.
std::pair<double, double> relative_spectrum(const Matrix& x, const Vector& s) {
  const Matrix b = x * x.transpose();
  const Matrix w = x * s.asDiagonal() * x.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eb(b);
  if (eb.info() != Eigen::Success) throw CertificationFailure("eigensolver failed on the frame");
  const Vector& vals = eb.eigenvalues();
  const double top = vals.maxCoeff();
  Index drop = 0;
  while (drop < vals.size() && vals(drop) <= 1e-9 * top) ++drop;
  const Index r = vals.size() - drop;
  if (r == 0) return {1.0, 1.0};
  const Vector inv_sqrt = vals.tail(r).cwiseSqrt().cwiseInverse();
  const Matrix whiten = inv_sqrt.asDiagonal() * eb.eigenvectors().rightCols(r).transpose();
  Matrix m = whiten * w * whiten.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> em(m, Eigen::EigenvaluesOnly);
  return {em.eigenvalues().minCoeff(), em.eigenvalues().maxCoeff()};
}

void write_weights_with_sidecar(const std::string& path, const SparseWeights& w,
                                const json& report) {
  io::write_weights_file(path, w);
  io::write_text_file(path + ".json", report.dump(2) + "\n");
}

int sparsify_graph_cmd(const RunConfig& c, json& r) {
  require_eps(c);
  require_path(c.input, "input");
  std::vector<std::string> warnings;
  const WeightedGraph g = io::read_edge_list_file(c.input, &warnings);
  r["warnings"] = strings_json(warnings);
  const Index n = g.vertex_count();
  r["input"] = {{"path", c.input},
                {"vertices", n},
                {"edges", g.edge_count()},
                {"ordered_support", g.ordered_support()}};

  const double theta = bss_theta(c.eps);
  const long support_bound = 2 * bss_iteration_count(n, c.eps);
  r["parameters"] = {{"eps", c.eps},
                     {"theta", theta},
                     {"quotient_upper_bound", theta * theta},
                     {"support_bound", support_bound}};

  const GraphSparsifyResult res = sparsify_graph(g, c.eps);
  const WeightedGraph& h = res.graph;
  r["result"] = {{"edges", h.edge_count()},
                 {"ordered_support", h.ordered_support()},
                 {"iterations", res.frame_result.iterations},
                 {"reduced_dim", res.frame_result.reduced_dim},
                 {"raw_lambda_min", res.frame_result.raw_lambda_min},
                 {"raw_lambda_max", res.frame_result.raw_lambda_max},
                 {"gamma", res.frame_result.gamma}};
  if (!c.output.empty()) {
    io::write_edge_list_file(c.output, h);
    r["result"]["output"] = c.output;
  }

  const QualityReport q = verify_quality(g, h);
  const bool support_ok = static_cast<long>(h.ordered_support()) <= support_bound;
  const bool sandwich_ok =
      q.min_quotient >= 1.0 - kTol && q.max_quotient <= theta * theta + kTol;
  r["certificate"] = {{"min_quotient", q.min_quotient},
                      {"max_quotient", q.max_quotient},
                      {"range_dim", q.range_dim},
                      {"kernel_dim", q.kernel_dim},
                      {"support_ok", support_ok},
                      {"sandwich_ok", sandwich_ok}};
  try {
    const SpectralGapReport gap = spectral_gap_report(h);
    r["certificate"]["spectral_gap"] = {{"ratio", gap.ratio},
                                        {"lambda_1", gap.lambda_1},
                                        {"lambda_2", gap.lambda_2},
                                        {"lambda_n", gap.lambda_n},
                                        {"average_degree", gap.average_degree},
                                        {"ramanujan_benchmark", gap.ramanujan_benchmark}};
  } catch (const ValidationError& e) {
    r["certificate"]["spectral_gap"] = nullptr;
    r["warnings"].push_back(std::string("spectral gap not reported: ") + e.what());
  }
  return support_ok && sandwich_ok ? kExitOk : kExitCertification;
}

int sparsify_frame_cmd(const RunConfig& c, json& r) {
  require_eps(c);
  require_path(c.input, "input");
  const Matrix rows = io::read_matrix_file(c.input);
  if (rows.rows() == 0 || rows.cols() == 0) throw ValidationError("frame file has no vectors");
  Matrix x = rows.transpose();
  const Frame raw(x.rows(), x);
  const double residual = raw.isotropy_residual();
  const bool isotropic = residual <= kTol;
  const Frame frame = isotropic ? Frame::certified(x) : raw;
  r["input"] = {{"path", c.input},
                {"vectors", frame.size()},
                {"dim", frame.ambient_dim()},
                {"isotropic", isotropic},
                {"isotropy_residual", residual}};
  if (!isotropic) r["warnings"].push_back("frame is not isotropic; sparsifying its whitened copy");

  const SparsifyResult res = sparsify_frame(frame, c.eps);
  r["parameters"] = {{"eps", c.eps},
                     {"theta", res.theta},
                     {"iterations", res.iterations},
                     {"support_bound", res.support_bound}};
  r["result"] = {{"support", res.weights.support()},
                 {"reduced_dim", res.reduced_dim},
                 {"raw_lambda_min", res.raw_lambda_min},
                 {"raw_lambda_max", res.raw_lambda_max},
                 {"gamma", res.gamma}};

  const double lo = (1.0 - c.eps) * (1.0 - c.eps);
  const double hi = (1.0 + c.eps) * (1.0 + c.eps);
  const auto [mn, mx] = relative_spectrum(x, res.weights.dense());
  const bool support_ok = static_cast<long>(res.weights.support()) <= res.support_bound;
  const bool sandwich_ok = mn >= lo - kTol && mx <= hi + kTol;
  r["certificate"] = {{"lower_limit", lo},
                      {"upper_limit", hi},
                      {"certified_min", res.certified_min},
                      {"certified_max", res.certified_max},
                      {"independent_min", mn},
                      {"independent_max", mx},
                      {"support_ok", support_ok},
                      {"sandwich_ok", sandwich_ok}};
  if (!c.output.empty()) {
    r["result"]["output"] = c.output;
    write_weights_with_sidecar(c.output, res.weights, r["certificate"]);
  }
  return support_ok && sandwich_ok ? kExitOk : kExitCertification;
}

int ri_select_cmd(const RunConfig& c, json& r) {
  require_eps(c);
  require_path(c.input, "operator");
  const Matrix t = io::read_matrix_file(c.input);
  const Frame frame = c.frame.empty() ? Frame::standard_basis(t.cols()) : [&] {
    const Matrix rows = io::read_matrix_file(c.frame);
    Matrix x = rows.transpose();
    const Frame raw(x.rows(), x);
    return raw.isotropy_residual() <= kTol ? Frame::certified(x) : raw;
  }();
  r["input"] = {{"operator_path", c.input},
                {"operator_rows", t.rows()},
                {"operator_cols", t.cols()},
                {"frame_path", c.frame.empty() ? json(nullptr) : json(c.frame)},
                {"frame_vectors", frame.size()}};

  const RiResult res = ri_select(frame, t, c.eps);
  r["warnings"] = strings_json(res.warnings);
  r["parameters"] = {{"eps", c.eps},
                     {"k", res.k},
                     {"hs_norm_squared", res.hs_sq},
                     {"operator_norm_squared", res.op_sq},
                     {"lower_bound", res.lower_bound},
                     {"whitened", res.whitened}};
  r["result"] = {{"selected", indices_json(res.sigma)}, {"steps", res.steps.size()}};

  double independent = 0.0;
  if (res.gram.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(res.gram, Eigen::EigenvaluesOnly);
    independent = es.eigenvalues().minCoeff();
  }
  const bool size_ok = static_cast<long>(res.sigma.size()) == res.k;
  const bool bound_ok = res.sigma.empty() || independent >= res.lower_bound - kTol;
  r["certificate"] = {{"gram_lambda_min", res.gram.rows() ? json(res.gram_lambda_min) : json(nullptr)},
                      {"independent_lambda_min", res.gram.rows() ? json(independent) : json(nullptr)},
                      {"size_ok", size_ok},
                      {"bound_ok", bound_ok}};
  if (!c.output.empty()) {
    std::ostringstream os;
    for (Index i : res.sigma) os << i << '\n';
    io::write_text_file(c.output, os.str());
    r["result"]["output"] = c.output;
  }
  return size_ok && bound_ok ? kExitOk : kExitCertification;
}

int embed_l1_cmd(const RunConfig& c, json& r) {
  require_eps(c);
  require_path(c.input, "input");
  const Matrix pts = io::read_matrix_file(c.input);
  r["input"] = {{"path", c.input}, {"points", pts.rows()}, {"dim", pts.cols()}};

  const L1Embedding res = embed_l1(pts, c.eps);
  r["parameters"] = {{"eps", c.eps},
                     {"eps0", res.eps0},
                     {"theta", bss_theta(res.eps0)},
                     {"dimension_bound", res.dimension_bound}};
  r["result"] = {{"target_dim", res.target_dim()},
                 {"cuts", res.cuts.cuts.size()},
                 {"selected_cuts", indices_json(res.selected)}};

  // Direct pairwise recomputation.
  double lo = 1.0, hi = 1.0;
  bool first = true;
  for (Index i = 0; i < pts.rows(); ++i) {
    for (Index j = i + 1; j < pts.rows(); ++j) {
      const double src = l1_distance(pts, i, j);
      if (src == 0.0) continue;
      const double ratio = l1_distance(res.points, i, j) / src;
      lo = first ? ratio : std::min(lo, ratio);
      hi = first ? ratio : std::max(hi, ratio);
      first = false;
    }
  }
  const bool dim_ok = res.target_dim() <= res.dimension_bound;
  const bool distortion_ok = lo >= 1.0 - kTol && hi <= 1.0 + c.eps + kTol;
  r["certificate"] = {{"min_distortion", lo},
                      {"max_distortion", hi},
                      {"dimension_ok", dim_ok},
                      {"distortion_ok", distortion_ok}};
  if (!c.output.empty()) {
    io::write_matrix_file(c.output, res.points);
    r["result"]["output"] = c.output;
  }
  return dim_ok && distortion_ok ? kExitOk : kExitCertification;
}

int embed_lp_cmd(const RunConfig& c, json& r) {
  require_eps(c);
  require_path(c.input, "input");
  const Matrix basis = io::read_matrix_file(c.input);
  r["input"] = {{"path", c.input}, {"basis_vectors", basis.rows()}, {"coordinates", basis.cols()}};

  const LpEmbedding res = embed_lp_even(basis, c.lp_exponent, c.eps);
  r["parameters"] = {{"p", res.p},
                     {"eps", c.eps},
                     {"eps0", res.eps0},
                     {"ratio_bound", res.ratio_bound},
                     {"d_bound", res.d_bound},
                     {"support_bound", res.support_bound},
                     {"seed", c.seed},
                     {"samples", c.samples}};
  r["result"] = {{"d", res.d},
                 {"support", res.selected.size()},
                 {"selected", indices_json(res.selected)},
                 {"weights", vector_json(res.weights)}};

  Vector s = Vector::Zero(res.m);
  for (std::size_t k = 0; k < res.selected.size(); ++k)
    s(res.selected[k]) = res.weights(static_cast<Index>(k));
  const auto [mn, mx] = relative_spectrum(res.y_basis.transpose(), s);

  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double dmin = 0.0, dmax = 0.0;
  for (long k = 0; k < c.samples; ++k) {
    Vector coef(res.n);
    for (Index j = 0; j < res.n; ++j) coef(j) = normal(rng);
    const Vector x = basis.transpose() * coef;
    const double dist = res.distortion(x);
    dmin = k == 0 ? dist : std::min(dmin, dist);
    dmax = k == 0 ? dist : std::max(dmax, dist);
  }
  const bool quad_ok = mn >= 1.0 - kTol && mx <= res.ratio_bound + kTol;
  const bool dist_ok = c.samples == 0 || (dmin >= 1.0 - kTol && dmax <= 1.0 + c.eps + kTol);
  const bool dim_ok = res.d <= res.d_bound;
  r["certificate"] = {{"certified_min", res.certified_min},
                      {"certified_max", res.certified_max},
                      {"independent_min", mn},
                      {"independent_max", mx},
                      {"sampled_min_distortion", dmin},
                      {"sampled_max_distortion", dmax},
                      {"distortion_bound", std::pow(res.ratio_bound, 1.0 / res.p)},
                      {"quadratic_ok", quad_ok},
                      {"distortion_ok", dist_ok},
                      {"dimension_ok", dim_ok}};
  if (!c.output.empty()) {
    SparseWeights w;
    w.source_size = res.m;
    for (std::size_t k = 0; k < res.selected.size(); ++k)
      w.weights[res.selected[k]] = res.weights(static_cast<Index>(k));
    r["result"]["output"] = c.output;
    write_weights_with_sidecar(c.output, w, r["certificate"]);
  }
  return quad_ok && dist_ok && dim_ok ? kExitOk : kExitCertification;
}

int john_approx_cmd(const RunConfig& c, json& r) {
  require_eps(c);
  require_path(c.input, "input");
  const Matrix table = io::read_matrix_file(c.input);
  if (table.cols() < 2) throw ValidationError("John decomposition file needs a weight and coordinates");
  JohnDecomposition jd;
  jd.weights = table.col(0);
  jd.points = table.rightCols(table.cols() - 1).transpose();
  r["input"] = {{"path", c.input}, {"points", jd.size()}, {"dim", jd.dim()}};

  const JohnApproximation res = approximate_john(jd, c.eps);
  r["parameters"] = {{"eps", c.eps},
                     {"eps0", res.eps0},
                     {"theta", bss_theta(res.eps0)},
                     {"support_bound", res.support_bound}};
  r["result"] = {{"support", res.support.size()},
                 {"output_points", res.decomposition.size()},
                 {"selected", indices_json(res.support)},
                 {"a_deviation", res.a_deviation}};

  const JohnDecomposition& out = res.decomposition;
  double norm_dev = 0.0;
  for (Index i = 0; i < out.size(); ++i)
    norm_dev = std::max(norm_dev, std::abs(out.points.col(i).norm() - 1.0));
  const double id = out.identity_residual();
  const double com = out.center_of_mass().cwiseAbs().maxCoeff();
  const bool ok = id <= kTol && com == 0.0 && norm_dev <= 1e-10 &&
                  static_cast<long>(res.support.size()) <= res.support_bound &&
                  res.a_deviation <= c.eps / 4.0 + kTol;
  r["certificate"] = {{"identity_residual", id},
                      {"center_of_mass", com},
                      {"unit_norm_deviation", norm_dev},
                      {"a_deviation_bound", c.eps / 4.0},
                      {"ok", ok}};
  if (!c.output.empty()) {
    Matrix t(out.size(), out.dim() + 1);
    t.col(0) = out.weights;
    t.rightCols(out.dim()) = out.points.transpose();
    io::write_matrix_file(c.output, t);
    r["result"]["output"] = c.output;
  }
  return ok ? kExitOk : kExitCertification;
}

int verify_cmd(const RunConfig& c, json& r) {
  require_path(c.input, "input");
  require_path(c.sparsifier, "sparsifier");
  if (c.eps_given) require_eps(c);
  std::vector<std::string> warnings;
  const WeightedGraph g = io::read_edge_list_file(c.input, &warnings);
  const WeightedGraph h = io::read_edge_list_file(c.sparsifier, &warnings);
  r["warnings"] = strings_json(warnings);
  r["input"] = {{"path", c.input},
                {"sparsifier_path", c.sparsifier},
                {"vertices", g.vertex_count()},
                {"g_ordered_support", g.ordered_support()},
                {"h_ordered_support", h.ordered_support()}};
  const QualityReport q = verify_quality(g, h);
  r["certificate"] = {{"min_quotient", q.min_quotient},
                      {"max_quotient", q.max_quotient},
                      {"range_dim", q.range_dim},
                      {"kernel_dim", q.kernel_dim}};
  if (!c.eps_given) return kExitOk;
  const double theta = bss_theta(c.eps);
  const long bound = 2 * bss_iteration_count(g.vertex_count(), c.eps);
  const bool sandwich_ok = q.min_quotient >= 1.0 - kTol && q.max_quotient <= theta * theta + kTol;
  const bool support_ok = static_cast<long>(h.ordered_support()) <= bound;
  r["parameters"] = {{"eps", c.eps}, {"quotient_upper_bound", theta * theta}, {"support_bound", bound}};
  r["certificate"]["sandwich_ok"] = sandwich_ok;
  r["certificate"]["support_ok"] = support_ok;
  return sandwich_ok && support_ok ? kExitOk : kExitCertification;
}

int cycle_demo_cmd(const RunConfig& c, json& r) {
  if (!(c.eps > 0.0)) throw ArgumentError("eps must be positive");
  const CycleCounterexample ce = cycle_counterexample(c.n, c.p, c.eps);
  r["input"] = {{"n", c.n}, {"p", c.p}, {"q", c.q}};
  r["parameters"] = {{"eps", c.eps},
                     {"seed", c.seed},
                     {"random_probes", kDefaultProbeCount},
                     {"path_weight", ce.path_weight}};

  std::vector<Vector> candidates = ce.witnesses;
  for (Vector& v : random_probes(c.n, kDefaultProbeCount, c.seed)) candidates.push_back(std::move(v));
  const ProbeSet probes(ce.g, std::move(candidates));
  const ProbeSet witnesses(ce.g, ce.witnesses);

  const QualityEstimate pq = estimate_quality(ce.g, ce.h, c.p, probes, 1.0 + c.eps);
  const QualityEstimate qq = estimate_quality(ce.g, ce.h, c.q, witnesses);
  const double growth_bound = cycle_q_growth(c.n, c.p, c.q, c.eps);
  if (!ce.p_guarantee_applies)
    r["warnings"].push_back("p < 1: the 1 + eps quality bound for the cycle pair does not apply");

  r["result"] = {{"probes_used", probes.size()},
                 {"probes_dropped", probes.dropped()},
                 {"p_quality_lower_bound", pq.lower_bound},
                 {"p_quality_bound", 1.0 + c.eps},
                 {"p_guarantee_applies", ce.p_guarantee_applies},
                 {"p_lambda_range", {pq.lambda_low, pq.lambda_high}},
                 {"q_quality_lower_bound", qq.lower_bound},
                 {"q_quality_growth", growth_bound},
                 {"q_quality_closed_form", cycle_q_witness_bound(c.n, c.p, c.q, c.eps)},
                 {"q_lambda_range", {qq.lambda_low, qq.lambda_high}}};

  const bool p_ok = !ce.p_guarantee_applies || pq.lower_bound <= 1.0 + c.eps + 1e-9;
  bool q_ok = true;
  if (c.q > c.p) {
    q_ok = qq.lower_bound >= growth_bound;
  } else if (ce.p_guarantee_applies) {
    const QualityEstimate low = estimate_quality(ce.g, ce.h, c.q, probes);
    r["result"]["q_probe_quality_lower_bound"] = low.lower_bound;
    q_ok = low.lower_bound <= 1.0 + c.eps + kTol;
  }
  r["certificate"] = {{"p_quality_ok", p_ok}, {"q_quality_ok", q_ok}};
  return p_ok && q_ok ? kExitOk : kExitCertification;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& c : kCommands)
    if (name == c.name) return c.command;
  return std::nullopt;
}

const char* command_name(Command c) {
  for (const auto& k : kCommands)
    if (k.command == c) return k.name;
  return "unknown";
}

RunOutcome run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  json& r = out.report;
  r["command"] = command_name(config.command);
  r["status"] = nullptr;
  r["exit_code"] = nullptr;
  r["input"] = json::object();
  r["parameters"] = json::object();
  r["result"] = json::object();
  r["certificate"] = json::object();
  r["warnings"] = json::array();
  r["error"] = nullptr;

  try {
    switch (config.command) {
      case Command::kSparsifyGraph: out.status = sparsify_graph_cmd(config, r); break;
      case Command::kSparsifyFrame: out.status = sparsify_frame_cmd(config, r); break;
      case Command::kRiSelect: out.status = ri_select_cmd(config, r); break;
      case Command::kEmbedL1: out.status = embed_l1_cmd(config, r); break;
      case Command::kEmbedLp: out.status = embed_lp_cmd(config, r); break;
      case Command::kJohnApprox: out.status = john_approx_cmd(config, r); break;
      case Command::kVerify: out.status = verify_cmd(config, r); break;
      case Command::kCycleDemo: out.status = cycle_demo_cmd(config, r); break;
    }
  } catch (const CertificationFailure& e) {
    out.status = kExitCertification;
    r["error"] = {{"kind", "certification_failure"}, {"message", e.what()}};
  } catch (const InvariantViolation& e) {
    out.status = kExitCertification;
    r["error"] = {{"kind", "invariant_violation"}, {"message", e.what()}};
  } catch (const ConvergenceError& e) {
    out.status = kExitCertification;
    r["error"] = {{"kind", "convergence_error"}, {"message", e.what()}};
  } catch (const FactorizationError& e) {
    out.status = kExitCertification;
    r["error"] = {{"kind", "factorization_error"},
                  {"message", e.what()},
                  {"smallest_pivot", e.smallest_pivot()}};
  } catch (const SingularUpdateError& e) {
    out.status = kExitCertification;
    r["error"] = {{"kind", "singular_update"}, {"message", e.what()}};
  } catch (const ParseError& e) {
    out.status = kExitInput;
    r["error"] = {{"kind", "parse_error"}, {"message", e.what()}, {"line", e.line()}};
  } catch (const Error& e) {
    out.status = kExitInput;
    r["error"] = {{"kind", "input_error"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    out.status = kExitCertification;
    r["error"] = {{"kind", "internal_error"}, {"message", e.what()}};
  }

  r["status"] = out.status == kExitOk            ? "ok"
                : out.status == kExitCertification ? "certification_failure"
                                                   : "input_error";
  r["exit_code"] = out.status;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  r["wall_clock_seconds"] = elapsed.count();
  return out;
}

}  // namespace rforge::cli
