#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sphstereo/geom.hpp"
#include "sphstereo/types.hpp"

namespace sphstereo {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> data);

// 8-bit images. Samples map to [0, 1] by /255; encoding rounds half up and
// clamps. PGM (P5) carries one channel, PPM (P6) three; .png goes through
// libpng, everything else is treated as PNM.
EquirectImage decode_pnm(std::span<const std::uint8_t> data);
Bytes encode_pnm(const EquirectImage& image);
EquirectImage read_image(const std::string& path);
void write_image(const EquirectImage& image, const std::string& path);

// Raw PFM raster: one ("Pf") or three ("PF") float32 channels, stored top row
// first in memory (the file itself is bottom row first).
struct FloatRaster {
  EquirectGrid grid;
  int channels = 1;
  std::vector<float> samples;
};

enum class Endian { Little, Big };

FloatRaster decode_pfm(std::span<const std::uint8_t> data);
Bytes encode_pfm(const FloatRaster& raster, Endian endian = Endian::Little);

// "disp.pfm" -> "disp.mask.pgm"; other names get ".mask.pgm" appended.
std::string mask_path_for(const std::string& pfm_path);

Mask read_mask(const std::string& path);
void write_mask(const Mask& mask, const std::string& path);

// Float maps: invalid pixels are stored as 0 in the PFM and 0 in the companion
// mask. A missing mask on read means every pixel is valid.
template <class Tag>
void write_floatmap(const FieldMap<Tag>& map, const std::string& path,
                    Endian endian = Endian::Little);
template <class Tag>
FieldMap<Tag> read_floatmap(const std::string& path);

// PLY with float32 x,y,z and optional uchar red,green,blue.
Bytes encode_ply(const PointCloud& cloud, bool binary);
PointCloud decode_ply(std::span<const std::uint8_t> data);
void write_ply(const PointCloud& cloud, const std::string& path, bool binary);
PointCloud read_ply(const std::string& path);

}  // namespace sphstereo
