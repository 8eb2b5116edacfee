#include "sphstereo/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "sphstereo/error.hpp"
#include "sphstereo/imageio.hpp"

namespace sphstereo {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_plain_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key, "cannot parse '" + text + "' as a number");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(key, "cannot parse '" + text + "' as an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, "cannot parse '" + text + "' as a boolean");
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(CostMetric m) {
  switch (m) {
    case CostMetric::SAD: return "sad";
    case CostMetric::ZNCC: return "zncc";
    case CostMetric::CENSUS: return "census";
  }
  return "census";
}

CostMetric parse_metric(const std::string& text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "sad") return CostMetric::SAD;
  if (t == "zncc") return CostMetric::ZNCC;
  if (t == "census") return CostMetric::CENSUS;
  throw ConfigError("cost_metric", "unknown metric '" + text + "'");
}

double parse_real(const std::string& key, const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_plain_real(key, text);
  const double num = parse_plain_real(key, trim(text.substr(0, slash)));
  const double den = parse_plain_real(key, trim(text.substr(slash + 1)));
  if (den == 0.0) throw ConfigError(key, "zero denominator in '" + text + "'");
  return num / den;
}

void RunConfig::validate() const {
  if (!(baseline_m > 0.0) || !std::isfinite(baseline_m))
    throw ConfigError("baseline_m", "must be positive");
  if (width < 2) throw ConfigError("width", "must be at least 2");
  if (height < 2) throw ConfigError("height", "must be at least 2");
  if (!(step_deg > 0.0) || !std::isfinite(step_deg))
    throw ConfigError("step_deg", "must be positive");
  if (num_levels < 1) throw ConfigError("num_levels", "must be at least 1");
  if (step_deg * num_levels >= 180.0)
    throw ConfigError("num_levels", "step_deg * num_levels must stay below 180 degrees");
  if (window_radius < 1) throw ConfigError("window_radius", "must be at least 1");
  if (!(sgm_p1 >= 0.0) || !std::isfinite(sgm_p1)) throw ConfigError("sgm_p1", "must be >= 0");
  if (!(sgm_p2 >= sgm_p1) || !std::isfinite(sgm_p2))
    throw ConfigError("sgm_p2", "must be >= sgm_p1");
  if (!(crop_fraction >= 0.0 && crop_fraction < 0.5))
    throw ConfigError("crop_fraction", "must lie in [0, 0.5)");
}

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", line_no, ParseError::Unit::Line);
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (kv.key.empty())
      throw ParseError("empty key", line_no, ParseError::Unit::Line);
    out.push_back(std::move(kv));
  }
  return out;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "baseline_m") cfg.baseline_m = parse_real(key, value);
  else if (key == "width") cfg.width = parse_int(key, value);
  else if (key == "height") cfg.height = parse_int(key, value);
  else if (key == "step_deg") cfg.step_deg = parse_real(key, value);
  else if (key == "num_levels") cfg.num_levels = parse_int(key, value);
  else if (key == "cost_metric") cfg.cost_metric = parse_metric(value);
  else if (key == "window_radius") cfg.window_radius = parse_int(key, value);
  else if (key == "sgm_p1") cfg.sgm_p1 = parse_real(key, value);
  else if (key == "sgm_p2") cfg.sgm_p2 = parse_real(key, value);
  else if (key == "polar_adaptive") cfg.polar_adaptive = parse_bool(key, value);
  else if (key == "crop_fraction") cfg.crop_fraction = parse_real(key, value);
  else throw ConfigError(key, "unknown key");
}

void apply_config_entries(RunConfig& cfg, const std::vector<KeyValue>& entries) {
  for (const auto& kv : entries) apply_config_entry(cfg, kv.key, kv.value);
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  apply_config_entries(cfg, parse_key_values(text));
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  const Bytes data = read_file_bytes(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::string format_config(const RunConfig& cfg) {
  std::string s;
  s += "baseline_m = " + format_real(cfg.baseline_m) + "\n";
  s += "width = " + std::to_string(cfg.width) + "\n";
  s += "height = " + std::to_string(cfg.height) + "\n";
  s += "step_deg = " + format_real(cfg.step_deg) + "\n";
  s += "num_levels = " + std::to_string(cfg.num_levels) + "\n";
  s += "cost_metric = " + to_string(cfg.cost_metric) + "\n";
  s += "window_radius = " + std::to_string(cfg.window_radius) + "\n";
  s += "sgm_p1 = " + format_real(cfg.sgm_p1) + "\n";
  s += "sgm_p2 = " + format_real(cfg.sgm_p2) + "\n";
  s += std::string("polar_adaptive = ") + (cfg.polar_adaptive ? "true" : "false") + "\n";
  s += "crop_fraction = " + format_real(cfg.crop_fraction) + "\n";
  return s;
}

void save_config(const RunConfig& cfg, const std::string& path) {
  const std::string text = format_config(cfg);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace sphstereo
