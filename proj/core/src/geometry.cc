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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geosearch/error.h"

namespace geosearch {

std::ostream& operator<<(std::ostream& os, const PixelRect& r) {
  return os << "[" << r.x1 << ", " << r.y1 << ", " << r.x2 << ", " << r.y2
            << "]";
}

std::string to_string(const PixelRect& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

void to_json(nlohmann::json& j, const PixelRect& r) {
  j = nlohmann::json::array({r.x1, r.y1, r.x2, r.y2});
}

void from_json(const nlohmann::json& j, PixelRect& r) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorKind::kInvalidArgument,
                "box must be an array of four integers, got " + j.dump());
  }
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "box coordinates must be numbers, got " + j.dump());
    }
  }
  auto coord = [](const nlohmann::json& v) {
    return static_cast<int>(std::lround(v.get<double>()));
  };
  r = {coord(j[0]), coord(j[1]), coord(j[2]), coord(j[3])};
}

GridCell::GridCell(int index) : index_(index) {
  if (index < 1 || index > 9) {
    throw Error(ErrorKind::kInvalidArgument,
                "grid cell index must be in 1..9, got " + std::to_string(index));
  }
}

GridCell GridCell::from_row_col(int row, int col) {
  return GridCell(row * 3 + col + 1);
}

PixelRect intersect(const PixelRect& a, const PixelRect& b) noexcept {
  return {std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
          std::min(a.y2, b.y2)};
}

std::int64_t intersection_area(const PixelRect& a,
                               const PixelRect& b) noexcept {
  const PixelRect i = intersect(a, b);
  return i.valid() ? i.area() : 0;
}

double iou(const PixelRect& a, const PixelRect& b) noexcept {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// round-half-up(k * side / 3) in exact integer arithmetic.
int third_boundary(int k, int side) {
  const std::int64_t num = 2 * static_cast<std::int64_t>(k) * side + 3;
  return static_cast<int>(num / 6);
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

PixelRect grid_cell(const PixelRect& region, GridCell cell) {
  if (region.width() < 3 || region.height() < 3) {
    throw Error(ErrorKind::kRegionTooSmall,
                "cannot partition " + to_string(region) + " into a 3x3 grid");
  }
  const int w = region.width();
  const int h = region.height();
  return {region.x1 + third_boundary(cell.col(), w),
          region.y1 + third_boundary(cell.row(), h),
          region.x1 + third_boundary(cell.col() + 1, w),
          region.y1 + third_boundary(cell.row() + 1, h)};
}

PixelRect scale_about_center(const PixelRect& region, double scale,
                             const ImageExtent& bounds) {
  const double cx = region.center_x();
  const double cy = region.center_y();
  const double half_w = 0.5 * scale * region.width();
  const double half_h = 0.5 * scale * region.height();
  const PixelRect scaled{round_half_up(cx - half_w), round_half_up(cy - half_h),
                         round_half_up(cx + half_w), round_half_up(cy + half_h)};
  return clip(scaled, bounds);
}

PixelRect zoom_out(const PixelRect& region, double lambda,
                   const ImageExtent& bounds) {
  if (!(lambda > 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "zoom-out factor must exceed 1");
  }
  if (!region.valid() || !bounds.contains(region)) {
    throw Error(ErrorKind::kOutOfBounds,
                "zoom-out region " + to_string(region) + " is not inside the image");
  }
  return scale_about_center(region, lambda, bounds);
}

PixelRect central_box(const PixelRect& region) {
  if (region.width() < 2 || region.height() < 2) {
    throw Error(ErrorKind::kRegionTooSmall,
                "no central box for " + to_string(region));
  }
  const int cw = (region.width() + 1) / 2;
  const int ch = (region.height() + 1) / 2;
  const int ox = region.x1 + (region.width() - cw) / 2;
  const int oy = region.y1 + (region.height() - ch) / 2;
  return {ox, oy, ox + cw, oy + ch};
}

PixelRect clip(const PixelRect& region, const ImageExtent& bounds) {
  const PixelRect c = intersect(region, bounds.rect());
  if (!c.valid()) {
    throw Error(ErrorKind::kEmptyClip,
                to_string(region) + " does not overlap a " +
                    std::to_string(bounds.width) + "x" +
                    std::to_string(bounds.height) + " image");
  }
  return c;
}

}  // namespace geosearch
