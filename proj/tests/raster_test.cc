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

#include <gtest/gtest.h>

#include <fstream>

#include "geosearch/error.h"
#include "support/test_support.h"

namespace geosearch {
namespace {

using testing::TempDir;

Raster gradient(int w, int h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t* p = px.data() + (static_cast<std::size_t>(y) * w + x) * 3;
      p[0] = static_cast<std::uint8_t>(x % 256);
      p[1] = static_cast<std::uint8_t>(y % 256);
      p[2] = static_cast<std::uint8_t>((x + y) % 256);
    }
  }
  return Raster({w, h}, std::move(px), "gradient");
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(RasterTest, PngRoundTrip) {
  TempDir dir;
  const Raster img = gradient(800, 800);
  save_png(img, dir / "a.png");
  const Raster back = load_raster(dir / "a.png");
  EXPECT_EQ(back.extent(), (ImageExtent{800, 800}));
  EXPECT_EQ(back.digest(), img.digest());
  EXPECT_EQ(probe_extent(dir / "a.png"), (ImageExtent{800, 800}));
}

TEST(RasterTest, JpegDecodes) {
  TempDir dir;
  write_bytes(dir / "a.jpg", encode_jpeg(gradient(120, 80)));
  const Raster back = load_raster(dir / "a.jpg");
  EXPECT_EQ(back.extent(), (ImageExtent{120, 80}));
}

TEST(RasterTest, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { load_raster("/nonexistent/none.png"); }), ErrorKind::kIo);
}

TEST(RasterTest, TruncatedJpegIsDecodeError) {
  TempDir dir;
  auto bytes = encode_jpeg(gradient(200, 200));
  bytes.resize(bytes.size() / 2);
  write_bytes(dir / "cut.jpg", bytes);
  EXPECT_EQ(kind_of([&] { load_raster(dir / "cut.jpg"); }), ErrorKind::kDecode);
}

TEST(RasterTest, GarbageIsDecodeError) {
  TempDir dir;
  write_bytes(dir / "junk.png", {1, 2, 3, 4, 5, 6, 7, 8, 9});
  EXPECT_EQ(kind_of([&] { load_raster(dir / "junk.png"); }), ErrorKind::kDecode);
}

TEST(CropTest, FullExtentIsIdentity) {
  const Raster img = gradient(90, 90);
  const Raster c = crop(img, img.extent().rect());
  EXPECT_EQ(c.extent(), img.extent());
  EXPECT_TRUE(std::equal(c.pixels().begin(), c.pixels().end(), img.pixels().begin()));
}

TEST(CropTest, DimensionsAndComposition) {
  const Raster img = gradient(900, 900);
  const Raster a = crop(img, {0, 0, 300, 300});
  EXPECT_EQ(a.extent(), (ImageExtent{300, 300}));
  const Raster nested = crop(crop(img, {100, 200, 700, 800}), {50, 60, 250, 160});
  const Raster direct = crop(img, {150, 260, 350, 360});
  EXPECT_EQ(nested.digest(), direct.digest());
}

TEST(CropTest, OutOfBounds) {
  const Raster img = gradient(10, 10);
  EXPECT_EQ(kind_of([&] { crop(img, {5, 5, 11, 10}); }), ErrorKind::kOutOfBounds);
}

TEST(ResizeTest, UnderLimitUnchanged) {
  const OracleImage o = resize_for_oracle(gradient(512, 512), 1024);
  EXPECT_EQ(o.image.extent(), (ImageExtent{512, 512}));
  EXPECT_EQ(o.scale_x, 1.0);
  EXPECT_EQ(o.scale_y, 1.0);
  const OracleImage strip = resize_for_oracle(gradient(1, 700), 1024);
  EXPECT_EQ(strip.image.extent(), (ImageExtent{1, 700}));
}

TEST(ResizeTest, HalvesWideImage) {
  const OracleImage o = resize_for_oracle(gradient(2048, 1024), 1024);
  EXPECT_EQ(o.image.extent(), (ImageExtent{1024, 512}));
  EXPECT_DOUBLE_EQ(o.scale_x, 0.5);
  EXPECT_DOUBLE_EQ(o.scale_y, 0.5);
  EXPECT_EQ(o.to_source({10, 20, 30, 40}), (PixelRect{20, 40, 60, 80}));
}

TEST(ResizeTest, BoxRoundTripWithinOnePixel) {
  const OracleImage o = resize_for_oracle(gradient(1500, 700), 1024);
  for (int x = 0; x < 1400; x += 97) {
    const PixelRect box{x, x / 3, x + 53, x / 3 + 71};
    const PixelRect back = o.to_source(o.to_oracle(box));
    EXPECT_LE(std::abs(back.x1 - box.x1), 1);
    EXPECT_LE(std::abs(back.y1 - box.y1), 1);
    EXPECT_LE(std::abs(back.x2 - box.x2), 1);
    EXPECT_LE(std::abs(back.y2 - box.y2), 1);
  }
}

}  // namespace
}  // namespace geosearch
