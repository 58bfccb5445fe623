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

#include "geosearch/geometry.h"

#include <gtest/gtest.h>

#include <random>

#include "geosearch/error.h"

namespace geosearch {
namespace {

TEST(IouTest, Examples) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0);
}

TEST(IouTest, TouchingEdgesDoNotOverlap) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
  EXPECT_FALSE(intersect({0, 0, 10, 10}, {10, 0, 20, 10}).valid());
}

TEST(GridCellTest, Examples) {
  EXPECT_EQ(grid_cell({0, 0, 900, 900}, GridCell(1)), (PixelRect{0, 0, 300, 300}));
  EXPECT_EQ(grid_cell({90, 90, 990, 990}, GridCell(5)), (PixelRect{390, 390, 690, 690}));
  EXPECT_EQ(grid_cell({0, 0, 10, 10}, GridCell(2)), (PixelRect{3, 0, 7, 3}));
}

TEST(GridCellTest, IndexingIsRowMajor) {
  const GridCell c = GridCell::from_row_col(2, 1);
  EXPECT_EQ(c.index(), 8);
  EXPECT_EQ(c.row(), 2);
  EXPECT_EQ(c.col(), 1);
  EXPECT_THROW(GridCell(0), Error);
  EXPECT_THROW(GridCell(10), Error);
}

TEST(GridCellTest, RejectsTinyRegions) {
  try {
    grid_cell({0, 0, 2, 10}, GridCell(1));
    FAIL() << "expected RegionTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRegionTooSmall);
  }
}

TEST(GridCellTest, TilesOddSizes) {
  for (int w = 3; w < 40; ++w) {
    for (int h = 3; h < 40; h += 7) {
      const PixelRect r{5, 7, 5 + w, 7 + h};
      std::int64_t sum = 0;
      for (int c : kAllCells) {
        const PixelRect g = grid_cell(r, GridCell(c));
        EXPECT_TRUE(r.contains(g));
        sum += g.area();
      }
      EXPECT_EQ(sum, r.area()) << w << "x" << h;
    }
  }
}

TEST(ZoomOutTest, Examples) {
  const ImageExtent b{1000, 1000};
  EXPECT_EQ(zoom_out({100, 100, 200, 200}, 2.0, b), (PixelRect{50, 50, 250, 250}));
  EXPECT_EQ(zoom_out({0, 0, 100, 100}, 2.0, b), (PixelRect{0, 0, 150, 150}));
  EXPECT_EQ(zoom_out({0, 0, 1000, 1000}, 2.0, b), (PixelRect{0, 0, 1000, 1000}));
}

TEST(ZoomOutTest, RejectsBadInput) {
  EXPECT_THROW(zoom_out({0, 0, 10, 10}, 1.0, {100, 100}), Error);
  EXPECT_THROW(zoom_out({90, 90, 110, 110}, 2.0, {100, 100}), Error);
}

TEST(CentralBoxTest, Examples) {
  EXPECT_EQ(central_box({0, 0, 400, 200}), (PixelRect{100, 50, 300, 150}));
  EXPECT_EQ(central_box({0, 0, 4, 4}), (PixelRect{1, 1, 3, 3}));
  EXPECT_EQ(central_box({10, 20, 110, 220}), (PixelRect{35, 70, 85, 170}));
  EXPECT_THROW(central_box({0, 0, 1, 5}), Error);
}

TEST(ClipTest, Examples) {
  const ImageExtent b{1000, 1000};
  EXPECT_EQ(clip({-50, -50, 150, 150}, b), (PixelRect{0, 0, 150, 150}));
  EXPECT_EQ(clip({0, 0, 100, 100}, b), (PixelRect{0, 0, 100, 100}));
  EXPECT_EQ(clip({900, 900, 1100, 1100}, b), (PixelRect{900, 900, 1000, 1000}));
  try {
    clip({1100, 0, 1200, 10}, b);
    FAIL() << "expected EmptyClip";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyClip);
  }
}

TEST(ScaleAboutCenterTest, DilationContainsInput) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pos(0, 900);
  std::uniform_int_distribution<int> side(1, 100);
  for (int i = 0; i < 2000; ++i) {
    const int x = pos(rng);
    const int y = pos(rng);
    const PixelRect r{x, y, x + side(rng), y + side(rng)};
    EXPECT_TRUE(scale_about_center(r, 2.0, {1000, 1000}).contains(r)) << r;
  }
}

TEST(PixelRectTest, JsonRoundTrip) {
  const PixelRect r{1, 2, 30, 40};
  const nlohmann::json j = r;
  EXPECT_EQ(j.dump(), "[1,2,30,40]");
  EXPECT_EQ(j.get<PixelRect>(), r);
  EXPECT_EQ(to_string(r), "[1, 2, 30, 40]");
  EXPECT_THROW(nlohmann::json::parse("[1,2,3]").get<PixelRect>(), std::exception);
}

}  // namespace
}  // namespace geosearch
