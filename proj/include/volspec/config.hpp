#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "volspec/experiments.hpp"

namespace volspec {

/// Reads an INI-style experiment description:
///
///   [experiment]  name, types, n_schedule, m_exponent, replications, seed,
///                 threads, plus optional threshold overrides
///   [simulation]  vol = constant|piecewise|ou and its parameters, drift,
///                 refinement
///   [noise]       variance, include_initial, include_terminal
///   [estimators]  kinds
///
/// `#` and `;` start comments. Unknown sections or keys, unparsable or
/// non-finite numbers, and missing required keys throw Error(Config). One
/// ExperimentConfig is produced per entry of `types`.
std::vector<ExperimentConfig> parse_config(std::istream& in, const std::string& default_name);
std::vector<ExperimentConfig> load_config(const std::filesystem::path& path);

}  // namespace volspec
