#include "rforge/cli.hpp"
#include "rforge/io.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using rforge::cli::Command;
  rforge::cli::RunConfig cfg;

  CLI::App app{"Deterministic spectral sparsification toolkit"};
  app.require_subcommand(1);

  auto eps_opt = [&](CLI::App* sub) {
    return sub->add_option("--eps", cfg.eps, "approximation parameter in (0,1)");
  };
  auto io_opts = [&](CLI::App* sub, const char* input_help) {
    sub->add_option("-i,--input", cfg.input, input_help)->required();
    sub->add_option("-o,--output", cfg.output, "result file");
    sub->add_option("-r,--report", cfg.report, "write the JSON report here as well");
  };

  struct Sub {
    Command command;
    CLI::App* app;
  };
  std::vector<Sub> subs;

  auto* sg = app.add_subcommand("sparsify-graph", "sparsify a weighted graph (edge list)");
  io_opts(sg, "edge list");
  eps_opt(sg);
  subs.push_back({Command::kSparsifyGraph, sg});

  auto* sf = app.add_subcommand("sparsify-frame", "sparsify a frame (one vector per row)");
  io_opts(sf, "dense matrix, one vector per row");
  eps_opt(sf);
  subs.push_back({Command::kSparsifyFrame, sf});

  auto* ri = app.add_subcommand("ri-select", "restricted-invertibility column selection");
  io_opts(ri, "operator T as a dense matrix");
  ri->add_option("--frame", cfg.frame, "frame vectors, one per row (default: standard basis)");
  eps_opt(ri);
  subs.push_back({Command::kRiSelect, ri});

  auto* l1 = app.add_subcommand("embed-l1", "reduce the dimension of points in l1");
  io_opts(l1, "dense matrix, one point per row");
  eps_opt(l1);
  subs.push_back({Command::kEmbedL1, l1});

  auto* lp = app.add_subcommand("embed-lp", "coordinate embedding of a subspace of l_p, p even");
  io_opts(lp, "basis vectors, one per row");
  eps_opt(lp);
  lp->add_option("--p", cfg.lp_exponent, "even exponent >= 4");
  lp->add_option("--samples", cfg.samples, "random vectors for the sampled distortion");
  lp->add_option("--seed", cfg.seed, "sampling seed");
  subs.push_back({Command::kEmbedLp, lp});

  auto* jo = app.add_subcommand("john-approx", "approximate a John decomposition");
  io_opts(jo, "rows 'weight x_1 ... x_n'");
  eps_opt(jo);
  subs.push_back({Command::kJohnApprox, jo});

  auto* ve = app.add_subcommand("verify", "certify the quality of a graph sparsifier");
  ve->add_option("-i,--input", cfg.input, "edge list of G")->required();
  ve->add_option("-s,--sparsifier", cfg.sparsifier, "edge list of H")->required();
  ve->add_option("-r,--report", cfg.report, "write the JSON report here as well");
  eps_opt(ve);
  subs.push_back({Command::kVerify, ve});

  auto* cy = app.add_subcommand("cycle-demo", "weighted-cycle p- versus q-sparsifier example");
  cy->add_option("--n", cfg.n, "cycle length (>= 3)");
  cy->add_option("--p", cfg.p, "exponent of the p-sparsifier");
  cy->add_option("--q", cfg.q, "comparison exponent");
  eps_opt(cy);
  cy->add_option("--seed", cfg.seed, "probe seed");
  cy->add_option("-r,--report", cfg.report, "write the JSON report here as well");
  subs.push_back({Command::kCycleDemo, cy});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rforge::cli::kExitInput;
  }

  for (const Sub& s : subs) {
    if (s.app->parsed()) {
      cfg.command = s.command;
      cfg.eps_given = s.app->count("--eps") > 0;
    }
  }

  const rforge::cli::RunOutcome out = rforge::cli::run(cfg);
  const std::string text = out.report.dump(2) + "\n";
  std::cout << text;
  if (!cfg.report.empty()) {
    try {
      rforge::io::write_text_file(cfg.report, text);
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return rforge::cli::kExitInput;
    }
  }
  if (out.status != 0 && out.report["error"].is_object())
    std::cerr << out.report["error"]["message"].get<std::string>() << '\n';
  return out.status;
}
