#pragma once

// Batch driver behind the rforge executable: one command per run, a JSON
// report with a fixed field order, and exit status 0 (all certificates pass),
// 1 (certification failure) or 2 (input error).

#include "rforge/nonlinear.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rforge::cli {

enum class Command {
  kSparsifyGraph,
  kSparsifyFrame,
  kRiSelect,
  kEmbedL1,
  kEmbedLp,
  kJohnApprox,
  kVerify,
  kCycleDemo,
};

std::optional<Command> parse_command(std::string_view name);
const char* command_name(Command c);

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertification = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
  Command command = Command::kSparsifyGraph;
  double eps = 0.5;
  bool eps_given = false;
  std::string input;
  std::string output;       // optional result file
  std::string report;       // optional; the report always goes to stdout too
  std::string sparsifier;   // verify: the candidate H
  std::string frame;        // ri-select: frame vectors, one per row
  std::uint64_t seed = kDefaultProbeSeed;
  // cycle-demo
  long n = 5;
  double p = 2.0;
  double q = 4.0;
  // embed-lp
  int lp_exponent = 4;
  long samples = 200;
};

struct RunOutcome {
  int status = kExitOk;
  nlohmann::ordered_json report;
};

/// Never throws for library errors; they are mapped to exit statuses and
/// recorded under "error" in the report.
RunOutcome run(const RunConfig& config);

}  // namespace rforge::cli
