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

#include <array>
#include <cstdint>
#include <ostream>
#include <string>

#include "json.hpp"

namespace geosearch {

// Axis-aligned box in integer pixels. Top-left origin, half-open on the
// right and bottom edges, so width = x2 - x1 and area is exact.
struct PixelRect {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  constexpr int width() const noexcept { return x2 - x1; }
  constexpr int height() const noexcept { return y2 - y1; }
  constexpr std::int64_t area() const noexcept {
    return static_cast<std::int64_t>(width()) * height();
  }
  constexpr bool valid() const noexcept { return x1 < x2 && y1 < y2; }
  constexpr int min_side() const noexcept {
    return width() < height() ? width() : height();
  }
  constexpr int max_side() const noexcept {
    return width() > height() ? width() : height();
  }

  constexpr bool contains(const PixelRect& o) const noexcept {
    return x1 <= o.x1 && y1 <= o.y1 && o.x2 <= x2 && o.y2 <= y2;
  }
  // Point containment on doubled coordinates, so fractional box centers
  // (x1 + x2) / 2 are tested exactly.
  constexpr bool contains_doubled_point(std::int64_t x2x,
                                        std::int64_t y2x) const noexcept {
    return 2 * static_cast<std::int64_t>(x1) <= x2x &&
           x2x < 2 * static_cast<std::int64_t>(x2) &&
           2 * static_cast<std::int64_t>(y1) <= y2x &&
           y2x < 2 * static_cast<std::int64_t>(y2);
  }
  constexpr double center_x() const noexcept { return 0.5 * (x1 + x2); }
  constexpr double center_y() const noexcept { return 0.5 * (y1 + y2); }

  constexpr PixelRect translated(int dx, int dy) const noexcept {
    return {x1 + dx, y1 + dy, x2 + dx, y2 + dy};
  }

  friend constexpr bool operator==(const PixelRect&, const PixelRect&) = default;
  friend constexpr auto operator<=>(const PixelRect&, const PixelRect&) = default;
};

std::ostream& operator<<(std::ostream& os, const PixelRect& r);
std::string to_string(const PixelRect& r);

// [x1, y1, x2, y2]
void to_json(nlohmann::json& j, const PixelRect& r);
void from_json(const nlohmann::json& j, PixelRect& r);

struct ImageExtent {
  int width = 0;
  int height = 0;

  constexpr bool valid() const noexcept { return width >= 1 && height >= 1; }
  constexpr PixelRect rect() const noexcept { return {0, 0, width, height}; }
  constexpr bool contains(const PixelRect& r) const noexcept {
    return rect().contains(r);
  }

  friend constexpr bool operator==(const ImageExtent&, const ImageExtent&) = default;
};

// One cell of the 3x3 zoom-in partition, row-major from 1 (top-left) to 9.
class GridCell {
 public:
  // Throws Error(kInvalidArgument) outside 1..9.
  explicit GridCell(int index);
  static GridCell from_row_col(int row, int col);

  int index() const noexcept { return index_; }
  int row() const noexcept { return (index_ - 1) / 3; }
  int col() const noexcept { return (index_ - 1) % 3; }

  friend bool operator==(GridCell, GridCell) = default;
  friend auto operator<=>(GridCell, GridCell) = default;

 private:
  int index_;
};

inline constexpr std::array<int, 9> kAllCells = {1, 2, 3, 4, 5, 6, 7, 8, 9};

// Intersection of two rects; invalid (empty) rect when they do not overlap.
PixelRect intersect(const PixelRect& a, const PixelRect& b) noexcept;
std::int64_t intersection_area(const PixelRect& a, const PixelRect& b) noexcept;

// |a n b| / |a u b|. Both rects must be valid.
double iou(const PixelRect& a, const PixelRect& b) noexcept;

// Cell of the 3x3 partition of `region`. Boundaries sit at
// round-half-up(k * side / 3) from the region origin, so the nine cells tile
// the region exactly. Throws RegionTooSmall when a side is < 3.
PixelRect grid_cell(const PixelRect& region, GridCell cell);

// Scales `region` by `scale` about its center, rounds half up, and clips to
// `bounds`.
PixelRect scale_about_center(const PixelRect& region, double scale,
                             const ImageExtent& bounds);

// Zoom-out transition: scale_about_center with scale > 1. The region must
// lie within bounds.
PixelRect zoom_out(const PixelRect& region, double lambda,
                   const ImageExtent& bounds);

// Box of half the width and height, centered in `region`. Throws
// RegionTooSmall when a side is < 2.
PixelRect central_box(const PixelRect& region);

// Intersection with (0, 0, width, height). Throws EmptyClip when empty.
PixelRect clip(const PixelRect& region, const ImageExtent& bounds);

}  // namespace geosearch
