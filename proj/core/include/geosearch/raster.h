/* Copyright 2026 The geosearch Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "geosearch/geometry.h"

namespace geosearch {

// Immutable 8-bit RGB image. The content digest is computed once at
// construction and identifies the pixels in oracle call keys.
class Raster {
 public:
  Raster(ImageExtent extent, std::vector<std::uint8_t> rgb, std::string source);

  const ImageExtent& extent() const noexcept { return extent_; }
  int width() const noexcept { return extent_.width; }
  int height() const noexcept { return extent_.height; }
  std::span<const std::uint8_t> pixels() const noexcept { return rgb_; }
  const std::uint8_t* pixel(int x, int y) const noexcept {
    return rgb_.data() + (static_cast<std::size_t>(y) * extent_.width + x) * 3;
  }
  const std::string& source() const noexcept { return source_; }
  const std::string& digest() const noexcept { return digest_; }

 private:
  ImageExtent extent_;
  std::vector<std::uint8_t> rgb_;
  std::string source_;
  std::string digest_;
};

// Decodes PNG or JPEG (sniffed from magic bytes). Throws IoError when the
// file cannot be read and DecodeError for corrupt or truncated data.
Raster load_raster(const std::filesystem::path& path);

// Reads only the header. Same errors as load_raster.
ImageExtent probe_extent(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Raster& img);
std::vector<std::uint8_t> encode_jpeg(const Raster& img, int quality = 90);
void save_png(const Raster& img, const std::filesystem::path& path);

// Copies `region`. Throws OutOfBounds unless region lies inside the image.
Raster crop(const Raster& img, const PixelRect& region);

// An image prepared for an oracle plus the per-axis factor applied to it
// (oracle pixels per source pixel; 1.0 when no resize happened).
struct OracleImage {
  Raster image;
  double scale_x = 1.0;
  double scale_y = 1.0;

  // Maps a box in oracle pixel space back to source pixels.
  PixelRect to_source(const PixelRect& box) const;
  PixelRect to_oracle(const PixelRect& box) const;
};

inline constexpr int kDefaultOracleMaxSide = 1024;

// Bilinear downscale so the longer side is at most `max_side`, preserving
// aspect ratio. Never upscales.
OracleImage resize_for_oracle(const Raster& img,
                              int max_side = kDefaultOracleMaxSide);

}  // namespace geosearch
