#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "sphstereo/error.hpp"
#include "sphstereo/imageio.hpp"
#include "sphstereo/render.hpp"

namespace sphstereo {
namespace {

double to_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw ParseError("bad number '" + text + "' for " + what, 0);
  return v;
}

std::vector<double> to_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(to_real(text.substr(start, comma - start), what));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

class Params {
 public:
  explicit Params(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  Vec3 vec(const std::string& key) {
    const auto v = to_reals(take(key), key);
    if (v.size() != 3) throw ParseError("'" + key + "' needs three comma-separated values", 0);
    return {v[0], v[1], v[2]};
  }
  Color color(const std::string& key, Color fallback) {
    if (!kv_.count(key)) return fallback;
    const Vec3 v = vec(key);
    return {v.x(), v.y(), v.z()};
  }
  double real(const std::string& key) { return to_real(take(key), key); }
  double real(const std::string& key, double fallback) {
    return kv_.count(key) ? real(key) : fallback;
  }
  std::string text(const std::string& key) { return take(key); }
  void finish() const {
    if (!kv_.empty()) throw ParseError("unknown primitive parameter '" + kv_.begin()->first + "'", 0);
  }

 private:
  std::string take(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ParseError("missing primitive parameter '" + key + "'", 0);
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }
  std::map<std::string, std::string> kv_;
};

}  // namespace

Primitive parse_primitive(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParseError("expected name=value, got '" + tok + "'", 0);
    if (!kv.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second)
      throw ParseError("duplicate parameter '" + tok.substr(0, eq) + "'", 0);
  }
  Params p(std::move(kv));

  Primitive prim;
  if (kind == "sphere") {
    prim.shape = Sphere{p.vec("center"), p.real("radius")};
  } else if (kind == "plane") {
    const Vec3 point = p.vec("point");
    const Vec3 normal = p.vec("normal");
    if (!(normal.norm() > 0.0)) throw ParseError("plane normal must be non-zero", 0);
    prim.shape = Plane{point, normal.normalized()};
  } else if (kind == "box") {
    prim.shape = AxisBox{p.vec("min"), p.vec("max")};
  } else {
    throw ParseError("unknown primitive kind '" + kind + "'", 0);
  }

  const std::string tex = p.text("texture");
  if (tex == "checker") {
    CheckerTexture c;
    c.scale = p.real("scale", c.scale);
    c.color_a = p.color("color_a", c.color_a);
    c.color_b = p.color("color_b", c.color_b);
    if (!(c.scale > 0.0)) throw ParseError("checker scale must be positive", 0);
    prim.texture = c;
  } else if (tex == "noise") {
    ValueNoiseTexture n;
    const double seed = p.real("seed", 1.0);
    if (seed < 0.0 || seed != std::floor(seed)) throw ParseError("noise seed must be a non-negative integer", 0);
    n.seed = static_cast<std::uint64_t>(seed);
    n.scale = p.real("scale", n.scale);
    if (!(n.scale > 0.0)) throw ParseError("noise scale must be positive", 0);
    prim.texture = n;
  } else if (tex == "solid") {
    prim.texture = SolidTexture{p.color("color", SolidTexture{}.color)};
  } else {
    throw ParseError("unknown texture '" + tex + "'", 0);
  }
  p.finish();
  return prim;
}

SceneFile parse_scene(std::string_view text) {
  SceneFile file;
  for (const KeyValue& kv : parse_key_values(text)) {
    if (kv.key != "primitive") {
      file.settings.push_back(kv);
      continue;
    }
    try {
      file.scene.primitives.push_back(parse_primitive(kv.value));
    } catch (const ParseError& e) {
      throw ParseError(e.message(), kv.line, ParseError::Unit::Line);
    }
  }
  try {
    file.scene.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 0);
  }
  return file;
}

SceneFile load_scene(const std::string& path) {
  const Bytes data = read_file_bytes(path);
  return parse_scene(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

}  // namespace sphstereo
