#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wkit/domain.hpp"
#include "wkit/jet.hpp"

namespace wkit {

/// Exit codes of the experiment runner.
enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitConfigError = 2,
};

struct ExperimentOutput {
  int exit_code = kExitConfigError;
  std::string report;  // JSON text, always produced unless the config is bad
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
};

/// Runs one experiment kind against a JSON config text. Deterministic for a
/// fixed (config, seed); the report embeds the effective seed, resolutions
/// and tolerances.
ExperimentOutput run_experiment(const std::string& kind, const std::string& config_text,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

/// Domain generator dispatch shared by the experiment kinds:
/// {"generator": name, "params": {...}, "resolution": r}.
SampledClosedSet domain_from_config(const std::string& config_text);

/// Jet sample subset for seminorm work on dense domains: all boundary samples
/// plus an interior subset thinned to the target spacing.
std::vector<Vec> jet_sample_subset(const SampledClosedSet& set, double interior_spacing,
                                   std::size_t max_points = 5000);

/// The counterexample jet (order m) on a sample subset of the exp-cusp
/// domain; gap selects the fjord-removed variant.
JetField exp_cusp_jet(const std::vector<Vec>& points, int m,
                      std::optional<double> gap = std::nullopt);

/// sin(u)cos(v) with closed-form partials.
ScalarField sincos_field();

}  // namespace wkit
