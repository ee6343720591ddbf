#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"

#include "brsim/methods.hpp"
#include "brsim/stats.hpp"

namespace brsim {

struct StudyConfig {
  std::vector<MethodConfig> methods;  // default: methods 0-4 with default budgets
  std::vector<double> alphas{0.1, 0.5, 1.0, 1.5, 1.9};
  double scale = 0.5;
  double b = 2.0;
  double p = 0.1;
  std::uint64_t N = 2000;
  std::uint64_t seed = 1;
  Margins margins = Margins::Gumbel;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Lambda sidecar for method 4; none disables caching.
  std::optional<std::filesystem::path> lambda_cache;
};

struct StudyRow {
  int method = 0;
  double alpha = 0.0;
  DevSummary dev;
  double mean_runtime_s = 0.0;
  double mean_paths = 0.0;
  double min_paths = 0.0;
  double max_paths = 0.0;
  std::optional<double> lambda_p;
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyRow> rows;  // methods outer, alphas inner
};

/// Parses the JSON config schema (see README). Throws ConfigError naming the field.
StudyConfig study_config_from_json(const nlohmann::json& doc);
MethodConfig method_config_from_json(const nlohmann::json& doc);

/// Fills default methods and validates. Throws ConfigError.
StudyConfig validated(StudyConfig config);

StudyResult run_study(const StudyConfig& config);

/// method, alpha, scale, b, p, N, dev_a, dev_0, dev_b, DEV, mean_paths
/// (+ mean_runtime_s when `timing`). Doubles are printed with %.17g.
void write_study_csv(const StudyResult& result, std::ostream& out, bool timing = false);
nlohmann::json study_json(const StudyResult& result);

}  // namespace brsim
