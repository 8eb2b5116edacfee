#include "sphstereo/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sphstereo/error.hpp"

namespace sphstereo {
namespace {

constexpr long kMaxDimension = 1 << 16;

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Whitespace-separated ASCII header tokens, bounded by the buffer.
class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> data, bool allow_comments)
      : data_(data), comments_(allow_comments) {}

  std::size_t pos() const { return pos_; }

  std::string token(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !is_space(data_[pos_]) &&
           !(comments_ && data_[pos_] == '#'))
      ++pos_;
    if (pos_ == start) throw ParseError(std::string("missing ") + what, start);
    return std::string(reinterpret_cast<const char*>(data_.data()) + start, pos_ - start);
  }

  long integer(const char* what, long lo, long hi) {
    const std::size_t start = (skip_space(), pos_);
    const std::string tok = token(what);
    long value = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || end != tok.data() + tok.size())
      throw ParseError(std::string("bad ") + what + " '" + tok + "'", start);
    if (value < lo || value > hi)
      throw ParseError(std::string(what) + " " + tok + " out of range", start);
    return value;
  }

  double real(const char* what) {
    const std::size_t start = (skip_space(), pos_);
    const std::string tok = token(what);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || end != tok.data() + tok.size() || !std::isfinite(value))
      throw ParseError(std::string("bad ") + what + " '" + tok + "'", start);
    return value;
  }

  // Only blanks may precede the next newline, which is consumed.
  void line_break(const char* after) {
    while (pos_ < data_.size() && (data_[pos_] == ' ' || data_[pos_] == '\t' || data_[pos_] == '\r'))
      ++pos_;
    if (pos_ >= data_.size() || data_[pos_] != '\n')
      throw ParseError(std::string("expected end of line after ") + after, pos_);
    ++pos_;
  }

  // The single whitespace byte separating header and payload.
  void end_of_header() {
    if (pos_ >= data_.size() || !is_space(data_[pos_]))
      throw ParseError("expected whitespace before payload", pos_);
    ++pos_;
  }

 private:
  void skip_space() {
    while (pos_ < data_.size()) {
      if (is_space(data_[pos_])) {
        ++pos_;
      } else if (comments_ && data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> data_;
  bool comments_;
  std::size_t pos_ = 0;
};

void require_payload(std::span<const std::uint8_t> data, std::size_t offset,
                     std::size_t expected) {
  const std::size_t actual = data.size() - offset;
  if (actual < expected)
    throw ParseError("truncated payload: expected " + std::to_string(expected) +
                         " bytes, got " + std::to_string(actual),
                     offset);
}

bool has_png_extension(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".png" || ext == ".PNG";
}

EquirectImage read_png(const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw ParseError("cannot decode PNG '" + path + "': " + png.message, 0);
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (png.width < 2 || png.height < 2 || png.width > kMaxDimension ||
      png.height > kMaxDimension) {
    png_image_free(&png);
    throw ParseError("unsupported PNG dimensions", 0);
  }
  Bytes buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr))
    throw ParseError("cannot decode PNG '" + path + "': " + png.message, 0);
  EquirectImage img(EquirectGrid{static_cast<int>(png.width), static_cast<int>(png.height)},
                    color ? 3 : 1);
  for (std::size_t k = 0; k < buffer.size(); ++k) img.samples[k] = buffer[k] / 255.0f;
  return img;
}

void write_png(const EquirectImage& image, const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.grid.width);
  png.height = static_cast<png_uint_32>(image.grid.height);
  png.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  Bytes buffer(image.grid.pixel_count() * (image.channels == 1 ? 1 : 3));
  const int out_ch = image.channels == 1 ? 1 : 3;
  for (std::size_t p = 0; p < image.grid.pixel_count(); ++p)
    for (int c = 0; c < out_ch; ++c)
      buffer[p * out_ch + c] = quantize_unit(image.samples[p * image.channels + c]);
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr))
    throw IoError("cannot write PNG '" + path + "': " + png.message);
}

template <class T>
T byteswap_value(T value) {
  auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

float load_float(const std::uint8_t* p, Endian endian) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  const bool host_little = std::endian::native == std::endian::little;
  if ((endian == Endian::Little) != host_little) bits = byteswap_value(bits);
  return std::bit_cast<float>(bits);
}

void store_float(std::uint8_t* p, float value, Endian endian) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(value);
  const bool host_little = std::endian::native == std::endian::little;
  if ((endian == Endian::Little) != host_little) bits = byteswap_value(bits);
  std::memcpy(p, &bits, 4);
}

void append(Bytes& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

std::string format_float(float v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Bytes read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return data;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("error writing '" + path + "'");
}

EquirectImage decode_pnm(std::span<const std::uint8_t> data) {
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6'))
    throw ParseError("not a binary PGM/PPM (expected P5 or P6)", 0);
  const int channels = data[1] == '6' ? 3 : 1;
  HeaderReader header(data.subspan(2), true);
  const long width = header.integer("width", 1, kMaxDimension);
  const long height = header.integer("height", 1, kMaxDimension);
  const std::size_t maxval_pos = header.pos() + 2;
  const long maxval = header.integer("maxval", 1, 65535);
  if (maxval != 255) throw ParseError("only maxval 255 is supported", maxval_pos);
  header.end_of_header();
  const std::size_t offset = header.pos() + 2;
  const std::size_t expected = static_cast<std::size_t>(width) * height * channels;
  require_payload(data, offset, expected);

  EquirectImage img;
  img.grid = EquirectGrid{static_cast<int>(width), static_cast<int>(height)};
  img.channels = channels;
  img.samples.resize(expected);
  for (std::size_t k = 0; k < expected; ++k) img.samples[k] = data[offset + k] / 255.0f;
  return img;
}

Bytes encode_pnm(const EquirectImage& image) {
  if (image.channels != 1 && image.channels != 3)
    throw DomainError("PNM output needs 1 or 3 channels");
  Bytes out;
  append(out, std::string(image.channels == 3 ? "P6\n" : "P5\n") +
                  std::to_string(image.grid.width) + " " + std::to_string(image.grid.height) +
                  "\n255\n");
  out.reserve(out.size() + image.samples.size());
  for (float s : image.samples) out.push_back(quantize_unit(s));
  return out;
}

EquirectImage read_image(const std::string& path) {
  if (has_png_extension(path)) return read_png(path);
  return decode_pnm(read_file_bytes(path));
}

void write_image(const EquirectImage& image, const std::string& path) {
  if (has_png_extension(path)) return write_png(image, path);
  write_file_bytes(path, encode_pnm(image));
}

FloatRaster decode_pfm(std::span<const std::uint8_t> data) {
  if (data.size() < 2 || data[0] != 'P' || (data[1] != 'f' && data[1] != 'F'))
    throw ParseError("bad PFM magic (expected Pf or PF)", 0);
  const int channels = data[1] == 'F' ? 3 : 1;
  HeaderReader header(data.subspan(2), false);
  header.line_break("magic");
  const long width = header.integer("width", 1, kMaxDimension);
  const long height = header.integer("height", 1, kMaxDimension);
  header.line_break("dimensions");
  const std::size_t scale_pos = header.pos() + 2;
  const double scale = header.real("scale");
  if (scale == 0.0) throw ParseError("PFM scale must be non-zero", scale_pos);
  header.end_of_header();
  const std::size_t offset = header.pos() + 2;
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  require_payload(data, offset, count * 4);

  const Endian endian = scale < 0.0 ? Endian::Little : Endian::Big;
  FloatRaster r;
  r.grid = EquirectGrid{static_cast<int>(width), static_cast<int>(height)};
  r.channels = channels;
  r.samples.resize(count);
  const std::size_t row_len = static_cast<std::size_t>(width) * channels;
  for (long file_row = 0; file_row < height; ++file_row) {
    const std::size_t mem_row = static_cast<std::size_t>(height - 1 - file_row);
    const std::uint8_t* src = data.data() + offset + file_row * row_len * 4;
    for (std::size_t k = 0; k < row_len; ++k)
      r.samples[mem_row * row_len + k] = load_float(src + 4 * k, endian);
  }
  return r;
}

Bytes encode_pfm(const FloatRaster& raster, Endian endian) {
  if (raster.channels != 1 && raster.channels != 3)
    throw DomainError("PFM needs 1 or 3 channels");
  Bytes out;
  append(out, std::string(raster.channels == 3 ? "PF\n" : "Pf\n") +
                  std::to_string(raster.grid.width) + " " +
                  std::to_string(raster.grid.height) + "\n" +
                  (endian == Endian::Little ? "-1.0\n" : "1.0\n"));
  const std::size_t header = out.size();
  const std::size_t row_len = static_cast<std::size_t>(raster.grid.width) * raster.channels;
  out.resize(header + raster.samples.size() * 4);
  for (int file_row = 0; file_row < raster.grid.height; ++file_row) {
    const std::size_t mem_row = static_cast<std::size_t>(raster.grid.height - 1 - file_row);
    std::uint8_t* dst = out.data() + header + file_row * row_len * 4;
    for (std::size_t k = 0; k < row_len; ++k)
      store_float(dst + 4 * k, raster.samples[mem_row * row_len + k], endian);
  }
  return out;
}

std::string mask_path_for(const std::string& pfm_path) {
  const std::string suffix = ".pfm";
  if (pfm_path.size() > suffix.size() &&
      pfm_path.compare(pfm_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return pfm_path.substr(0, pfm_path.size() - suffix.size()) + ".mask.pgm";
  return pfm_path + ".mask.pgm";
}

Mask read_mask(const std::string& path) {
  const EquirectImage img = decode_pnm(read_file_bytes(path));
  if (img.channels != 1) throw ParseError("mask must be a single-channel PGM", 0);
  Mask m(img.grid);
  for (std::size_t k = 0; k < img.samples.size(); ++k) m.values[k] = img.samples[k] > 0.5f;
  return m;
}

void write_mask(const Mask& mask, const std::string& path) {
  EquirectImage img(mask.grid, 1);
  for (std::size_t k = 0; k < mask.values.size(); ++k)
    img.samples[k] = mask.values[k] ? 1.0f : 0.0f;
  write_file_bytes(path, encode_pnm(img));
}

template <class Tag>
void write_floatmap(const FieldMap<Tag>& map, const std::string& path, Endian endian) {
  FloatRaster r;
  r.grid = map.grid;
  r.channels = 1;
  r.samples.resize(map.values.size());
  Mask mask(map.grid);
  for (std::size_t k = 0; k < map.values.size(); ++k) {
    const bool ok = FieldMap<Tag>::is_valid(map.values[k]);
    r.samples[k] = ok ? static_cast<float>(map.values[k]) : 0.0f;
    mask.values[k] = ok ? 1 : 0;
  }
  write_file_bytes(path, encode_pfm(r, endian));
  write_mask(mask, mask_path_for(path));
}

template <class Tag>
FieldMap<Tag> read_floatmap(const std::string& path) {
  const FloatRaster r = decode_pfm(read_file_bytes(path));
  if (r.channels != 1) throw ParseError("float map must be single-channel (Pf)", 0);
  FieldMap<Tag> map(r.grid);
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    if (!std::isfinite(r.samples[k]))
      throw ParseError("float map contains non-finite value", 0);
    map.values[k] = r.samples[k];
  }
  const std::string mpath = mask_path_for(path);
  if (std::filesystem::exists(mpath)) {
    const Mask mask = read_mask(mpath);
    if (!(mask.grid == r.grid)) throw ParseError("mask dimensions do not match '" + path + "'", 0);
    for (std::size_t k = 0; k < mask.values.size(); ++k)
      if (!mask.values[k]) map.values[k] = FieldMap<Tag>::invalid();
  }
  return map;
}

template void write_floatmap<DepthTag>(const DepthMap&, const std::string&, Endian);
template void write_floatmap<DisparityTag>(const DisparityMap&, const std::string&, Endian);
template DepthMap read_floatmap<DepthTag>(const std::string&);
template DisparityMap read_floatmap<DisparityTag>(const std::string&);

Bytes encode_ply(const PointCloud& cloud, bool binary) {
  std::string header = "ply\nformat ";
  header += binary ? "binary_little_endian" : "ascii";
  header += " 1.0\nelement vertex " + std::to_string(cloud.size()) +
            "\nproperty float x\nproperty float y\nproperty float z\n";
  if (cloud.has_color())
    header += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  header += "end_header\n";
  Bytes out;
  append(out, header);
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const Vec3& p = cloud.positions[k];
    if (binary) {
      for (int a = 0; a < 3; ++a) {
        std::uint8_t buf[4];
        store_float(buf, static_cast<float>(p[a]), Endian::Little);
        out.insert(out.end(), buf, buf + 4);
      }
      if (cloud.has_color()) out.insert(out.end(), cloud.colors[k].begin(), cloud.colors[k].end());
    } else {
      std::string line = format_float(static_cast<float>(p.x())) + " " +
                         format_float(static_cast<float>(p.y())) + " " +
                         format_float(static_cast<float>(p.z()));
      if (cloud.has_color())
        for (auto c : cloud.colors[k]) line += " " + std::to_string(c);
      append(out, line + "\n");
    }
  }
  return out;
}

PointCloud decode_ply(std::span<const std::uint8_t> data) {
  const std::string marker = "end_header\n";
  const std::string_view text(reinterpret_cast<const char*>(data.data()), data.size());
  const std::size_t end = text.find(marker);
  if (text.substr(0, 4) != "ply\n" || end == std::string_view::npos)
    throw ParseError("not a PLY file", 0);
  std::istringstream header(std::string(text.substr(0, end)));
  std::string line;
  std::getline(header, line);
  bool binary = false;
  bool have_format = false;
  long count = -1;
  std::vector<std::string> props;
  while (std::getline(header, line)) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt, version, extra;
      ls >> fmt >> version;
      if (version != "1.0" || (ls >> extra))
        throw ParseError("unsupported PLY version '" + version + "'", 0);
      if (fmt == "binary_little_endian") binary = true;
      else if (fmt != "ascii") throw ParseError("unsupported PLY format '" + fmt + "'", 0);
      have_format = true;
    } else if (kw == "element") {
      std::string name;
      ls >> name >> count;
      if (name != "vertex" || !ls || count < 0) throw ParseError("unsupported PLY element", 0);
    } else if (kw == "property") {
      std::string type, name;
      ls >> type >> name;
      props.push_back(type + " " + name);
    }
  }
  const std::vector<std::string> xyz = {"float x", "float y", "float z"};
  const std::vector<std::string> xyzrgb = {"float x",     "float y",      "float z",
                                           "uchar red", "uchar green", "uchar blue"};
  if (!have_format || count < 0 || (props != xyz && props != xyzrgb))
    throw ParseError("unsupported PLY layout", 0);
  const bool color = props.size() == 6;

  PointCloud cloud;
  std::size_t pos = end + marker.size();
  const std::size_t stride = 12 + (color ? 3 : 0);
  if (binary) {
    require_payload(data, pos, static_cast<std::size_t>(count) * stride);
    for (long k = 0; k < count; ++k, pos += stride) {
      const Vec3 p(load_float(&data[pos], Endian::Little), load_float(&data[pos + 4], Endian::Little),
                   load_float(&data[pos + 8], Endian::Little));
      cloud.positions.push_back(p);
      if (color) cloud.colors.push_back({data[pos + 12], data[pos + 13], data[pos + 14]});
    }
    return cloud;
  }
  std::istringstream body(std::string(text.substr(pos)));
  for (long k = 0; k < count; ++k) {
    float x, y, z;
    if (!(body >> x >> y >> z)) throw ParseError("truncated PLY body", pos);
    cloud.positions.emplace_back(x, y, z);
    if (color) {
      int r, g, b;
      if (!(body >> r >> g >> b) || r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
        throw ParseError("bad PLY color", pos);
      cloud.colors.push_back({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                              static_cast<std::uint8_t>(b)});
    }
  }
  return cloud;
}

void write_ply(const PointCloud& cloud, const std::string& path, bool binary) {
  write_file_bytes(path, encode_ply(cloud, binary));
}

PointCloud read_ply(const std::string& path) { return decode_ply(read_file_bytes(path)); }

}  // namespace sphstereo
