#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sphstereo {

enum class CostMetric { SAD, ZNCC, CENSUS };

std::string to_string(CostMetric m);
CostMetric parse_metric(const std::string& text);

// Flat run configuration shared by every command.
struct RunConfig {
  double baseline_m = 0.2;
  int width = 1024;
  int height = 512;
  double step_deg = 1.0 / 3.0;
  int num_levels = 192;
  CostMetric cost_metric = CostMetric::CENSUS;
  int window_radius = 3;
  double sgm_p1 = 0.02;
  double sgm_p2 = 0.25;
  bool polar_adaptive = true;
  double crop_fraction = 0.05;

  // Throws ConfigError naming the first violated key.
  void validate() const;
};

// One "key = value" line of the shared text syntax. Blank lines and '#'
// comments are skipped; surrounding whitespace is trimmed.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<KeyValue> parse_key_values(std::string_view text);

// Applies entries onto cfg (unknown keys and unparseable values throw).
void apply_config_entries(RunConfig& cfg, const std::vector<KeyValue>& entries);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// Accepts plain reals and "a/b" fractions ("1/3").
double parse_real(const std::string& key, const std::string& text);

}  // namespace sphstereo
