#pragma once

#include "homog/problem.hpp"
#include "homog/scalar.hpp"
#include "homog_harness/config.hpp"
#include "homog_harness/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace homog::harness {

const std::vector<std::string>& command_names();

/// Command-line overrides, applied on top of the config.
struct Overrides {
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

struct ProblemSetup {
  PeriodicProblem problem;
  std::optional<ScalarInput> scalar;  // set for the scalar preset
};

/// Throws ConfigError for unknown presets or inconsistent parameters and DataError
/// for unreadable grid files.
ProblemSetup make_problem(const Config& cfg, std::uint64_t seed);

/// Runs the configured pipeline. Errors at individual points are recorded in the
/// report; errors that make the whole run meaningless propagate.
Report run(const Config& cfg, int threads, std::uint64_t seed);

/// Full CLI flow: load, override, run, write. Returns the exit status
/// (0 pass, 1 invariant failure, 2 config or data error).
int run_cli(const std::string& command, const std::string& config_path, const Overrides& ov, std::ostream& log);

}  // namespace homog::harness
