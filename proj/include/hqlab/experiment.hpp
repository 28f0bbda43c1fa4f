#pragma once

#include "hqlab/io.hpp"
#include "hqlab/models.hpp"

#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqlab {

/// Raised for configs that do not match the schema; the CLI maps it to exit
/// status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"oracle",     "asym",     "morse",    "volume",
                                          "regularize", "spectral", "optimize", "conjecture"};
  return k;
}

/// Parsed INI experiment. See README for the key reference.
struct ExperimentConfig {
  std::string kind;
  std::string name;
  std::uint64_t seed = 1;
  int threads = 0;
  ModelSpec model;
  NSClass cls;
  std::vector<int> q;
  boost::property_tree::ptree run;  // [run] section, validated per kind
  std::optional<double> expect_value;
  std::optional<double> expect_tolerance;  // relative
  std::optional<double> expect_absolute;
  std::string text;                        // config echo

  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback = {}) const;
  std::vector<int> get_ints(const std::string& key, std::vector<int> fallback = {}) const;
  bool has(const std::string& key) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOutcome {
  int status = 0;  // 0 all assertions pass, 1 otherwise
  std::vector<Assertion> assertions;
  Json summary;
};

/// Runs the experiment and writes manifest.json, summary.json and the kind's
/// CSV files into `out`. Only the manifest carries wall time.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out);

/// Collects every manifest.json below `dir` into dir/index.json, keyed by
/// experiment|model|class|q and deduplicated by summary content hash.
/// Unreadable manifests are listed under "warnings".
Json report_index(const std::filesystem::path& dir);

}  // namespace hqlab
