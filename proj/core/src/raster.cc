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

#include "geosearch/raster.h"

#include <jpeglib.h>
#include <jerror.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

#include "geosearch/digest.h"
#include "geosearch/error.h"

namespace geosearch {

namespace {

std::string compute_digest(const ImageExtent& extent,
                           std::span<const std::uint8_t> rgb) {
  Sha256 h;
  h.field("rgb8");
  h.field(extent.width);
  h.field(extent.height);
  h.update(rgb);
  return h.hex_digest();
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::kIo, "read failed for " + path.string());
  }
  return bytes;
}

enum class Format { kPng, kJpeg, kUnknown };

Format sniff(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngMagic[] = {0x89, 'P', 'N', 'G',
                                               0x0d, 0x0a, 0x1a, 0x0a};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngMagic),
                                      std::end(kPngMagic), bytes.begin())) {
    return Format::kPng;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 &&
      bytes[2] == 0xff) {
    return Format::kJpeg;
  }
  return Format::kUnknown;
}

// ---- PNG -------------------------------------------------------------------

struct PngDecoded {
  ImageExtent extent;
  std::vector<std::uint8_t> rgb;
};

PngDecoded decode_png(std::span<const std::uint8_t> bytes, bool header_only,
                      const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::kDecode, name + ": " + image.message);
  }
  PngDecoded out;
  out.extent = {static_cast<int>(image.width), static_cast<int>(image.height)};
  if (header_only) {
    png_image_free(&image);
    return out;
  }
  image.format = PNG_FORMAT_RGB;
  out.rgb.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::kDecode, name + ": " + msg);
  }
  return out;
}

// ---- JPEG ------------------------------------------------------------------

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
  bool truncated;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_emit_message(j_common_ptr cinfo, int level) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF) {
    err->truncated = true;
  }
}

// Plain-C style so that longjmp never skips a C++ destructor.
bool decode_jpeg_raw(const std::uint8_t* data, std::size_t size,
                     bool header_only, ImageExtent* extent,
                     std::vector<std::uint8_t>* rgb, JpegErrorMgr* err) {
  jpeg_decompress_struct cinfo;
  cinfo.err = jpeg_std_error(&err->pub);
  err->pub.error_exit = jpeg_error_exit;
  err->pub.emit_message = jpeg_emit_message;
  err->truncated = false;
  err->message[0] = '\0';
  if (setjmp(err->jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, const_cast<unsigned char*>(data),
               static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  extent->width = static_cast<int>(cinfo.image_width);
  extent->height = static_cast<int>(cinfo.image_height);
  if (header_only) {
    jpeg_destroy_decompress(&cinfo);
    return true;
  }
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  rgb->resize(stride * cinfo.output_height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb->data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

PngDecoded decode_jpeg(std::span<const std::uint8_t> bytes, bool header_only,
                       const std::string& name) {
  PngDecoded out;
  JpegErrorMgr err;
  if (!decode_jpeg_raw(bytes.data(), bytes.size(), header_only, &out.extent,
                       &out.rgb, &err)) {
    throw Error(ErrorKind::kDecode, name + ": " + err.message);
  }
  if (err.truncated) {
    throw Error(ErrorKind::kDecode, name + ": premature end of JPEG data");
  }
  return out;
}

PngDecoded decode(const std::filesystem::path& path, bool header_only) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  const std::string name = path.string();
  PngDecoded d;
  switch (sniff(bytes)) {
    case Format::kPng:
      d = decode_png(bytes, header_only, name);
      break;
    case Format::kJpeg:
      d = decode_jpeg(bytes, header_only, name);
      break;
    case Format::kUnknown:
      throw Error(ErrorKind::kDecode, name + ": not a PNG or JPEG file");
  }
  if (!d.extent.valid()) {
    throw Error(ErrorKind::kDecode, name + ": empty image");
  }
  return d;
}

}  // namespace

Raster::Raster(ImageExtent extent, std::vector<std::uint8_t> rgb,
               std::string source)
    : extent_(extent), rgb_(std::move(rgb)), source_(std::move(source)) {
  if (!extent_.valid()) {
    throw Error(ErrorKind::kInvalidArgument, "raster extent must be positive");
  }
  const std::size_t expected =
      static_cast<std::size_t>(extent_.width) * extent_.height * 3;
  if (rgb_.size() != expected) {
    throw Error(ErrorKind::kInvalidArgument,
                "raster buffer holds " + std::to_string(rgb_.size()) +
                    " bytes, expected " + std::to_string(expected));
  }
  digest_ = compute_digest(extent_, rgb_);
}

Raster load_raster(const std::filesystem::path& path) {
  PngDecoded d = decode(path, /*header_only=*/false);
  return Raster(d.extent, std::move(d.rgb), path.string());
}

ImageExtent probe_extent(const std::filesystem::path& path) {
  return decode(path, /*header_only=*/true).extent;
}

std::vector<std::uint8_t> encode_png(const Raster& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0,
                                 img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorKind::kIo, std::string("PNG encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0,
                                 img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorKind::kIo, std::string("PNG encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const Raster& img, int quality) {
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  unsigned char* mem = nullptr;
  unsigned long mem_size = 0;
  jpeg_mem_dest(&cinfo, &mem, &mem_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.pixels().data() +
                                        stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(mem, mem + mem_size);
  jpeg_destroy_compress(&cinfo);
  std::free(mem);
  return out;
}

void save_png(const Raster& img, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, "write failed for " + path.string());
  }
}

Raster crop(const Raster& img, const PixelRect& region) {
  if (!region.valid() || !img.extent().contains(region)) {
    throw Error(ErrorKind::kOutOfBounds,
                "crop " + to_string(region) + " outside " +
                    std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " image");
  }
  const std::size_t row_bytes = static_cast<std::size_t>(region.width()) * 3;
  std::vector<std::uint8_t> rgb(row_bytes * region.height());
  for (int y = 0; y < region.height(); ++y) {
    std::memcpy(rgb.data() + row_bytes * y, img.pixel(region.x1, region.y1 + y),
                row_bytes);
  }
  return Raster({region.width(), region.height()}, std::move(rgb),
                img.source() + "#" + to_string(region));
}

PixelRect OracleImage::to_source(const PixelRect& box) const {
  auto map = [](int v, double s) {
    return static_cast<int>(std::lround(v / s));
  };
  return {map(box.x1, scale_x), map(box.y1, scale_y), map(box.x2, scale_x),
          map(box.y2, scale_y)};
}

PixelRect OracleImage::to_oracle(const PixelRect& box) const {
  auto map = [](int v, double s) {
    return static_cast<int>(std::lround(v * s));
  };
  return {map(box.x1, scale_x), map(box.y1, scale_y), map(box.x2, scale_x),
          map(box.y2, scale_y)};
}

OracleImage resize_for_oracle(const Raster& img, int max_side) {
  if (max_side < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max_side must be positive");
  }
  const int longest = std::max(img.width(), img.height());
  if (longest <= max_side) {
    return {img, 1.0, 1.0};
  }
  const double s = static_cast<double>(max_side) / longest;
  const int dw = std::max(1, static_cast<int>(std::lround(img.width() * s)));
  const int dh = std::max(1, static_cast<int>(std::lround(img.height() * s)));
  const double sx = static_cast<double>(img.width()) / dw;
  const double sy = static_cast<double>(img.height()) / dh;

  std::vector<std::uint8_t> out(static_cast<std::size_t>(dw) * dh * 3);
  for (int y = 0; y < dh; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0,
                                 static_cast<double>(img.height() - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < dw; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0,
                                   static_cast<double>(img.width() - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      const std::uint8_t* p00 = img.pixel(x0, y0);
      const std::uint8_t* p01 = img.pixel(x1, y0);
      const std::uint8_t* p10 = img.pixel(x0, y1);
      const std::uint8_t* p11 = img.pixel(x1, y1);
      std::uint8_t* dst = out.data() + (static_cast<std::size_t>(y) * dw + x) * 3;
      for (int c = 0; c < 3; ++c) {
        const double top = p00[c] + (p01[c] - p00[c]) * wx;
        const double bottom = p10[c] + (p11[c] - p10[c]) * wx;
        dst[c] = static_cast<std::uint8_t>(
            std::lround(std::clamp(top + (bottom - top) * wy, 0.0, 255.0)));
      }
    }
  }
  return {Raster({dw, dh}, std::move(out), img.source() + "@resized"),
          dw / static_cast<double>(img.width()),
          dh / static_cast<double>(img.height())};
}

}  // namespace geosearch
