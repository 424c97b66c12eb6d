#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// tests can drive it in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gchsh/bounds.hpp"
#include "gchsh/selector.hpp"

namespace gchsh::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,             // computation failed (e.g. sweep without inflection)
  kInvalidInput = 2,        // bad flag, unsupported theta, score above 2 sqrt2, corrupt table
  kMissingTableEntry = 3,   // theta not in the table and --compute-missing not given
  kOutsideRegion = 4,       // correlators outside the self-testing region
  kUnwritablePath = 5,
};

inline constexpr const char* kTableEnvVar = "GCHSH_TABLE";
inline constexpr const char* kDefaultTablePath = "gchsh_table.json";

struct RunConfig {
  std::uint64_t seed = 20210101;
  int restarts = 12;
  double kappa = 0.025;
  double local_tol = 1e-7;
  int max_steps = 400;
  int confirm_steps = 2;
  std::filesystem::path table_path = kDefaultTablePath;
  selector::ThetaGrid theta_grid{};

  bounds::SweepConfig sweep_config() const;
  /// Throws InputError when a numeric field is not positive.
  void validate() const;
};

/// Radians as a decimal ("0.3927") or a fraction of pi ("pi/8", "3pi/16", "3*pi/16").
/// Throws InputError on anything else.
double parse_theta(std::string_view text);

/// Merges a JSON configuration file into `config`. Throws InputError on
/// unreadable files or unknown keys.
void load_config(const std::filesystem::path& path, RunConfig& config);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gchsh::cli
