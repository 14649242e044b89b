// core/src/plot.cc
//
// Copyright 2026 The Comedic Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "comedic/plot.h"

#include <png.h>

#include <cstdio>
#include <memory>

#include "comedic/error.h"
#include "comedic/util.h"

namespace comedic {

std::array<std::uint8_t, 3> label_color(std::string_view label) {
  const std::uint64_t h = fnv1a64(label);
  // channels in [48, 223]
  auto channel = [h](int shift) {
    return static_cast<std::uint8_t>(48 + ((h >> shift) & 0xff) * 176 / 256);
  };
  return {channel(0), channel(21), channel(42)};
}

PlotLayout layout_durations(const std::vector<DurationTrace> &traces, const PlotStyle &style) {
  if (traces.empty()) throw InputError("plot_durations: no traces");
  if (style.pixels_per_frame < 1 || style.row_height < 1)
    throw ConfigError("plot_durations: bad plot style");
  PlotLayout layout;
  layout.pixels_per_frame = style.pixels_per_frame;
  int longest = 0;
  for (const auto &t : traces) {
    if (t.segments.empty()) throw InputError("plot_durations: trace '" + t.name + "' is empty");
    if (!t.contiguous()) throw InputError("plot_durations: trace '" + t.name + "' has gaps");
    longest = std::max(longest, t.total_frames());
  }
  layout.width = 2 * style.margin + std::max(1, longest * style.pixels_per_frame);
  layout.height = 2 * style.margin + static_cast<int>(traces.size()) * style.row_height +
                  static_cast<int>(traces.size() - 1) * style.row_gap;
  for (std::size_t row = 0; row < traces.size(); ++row) {
    const int y0 = style.margin + static_cast<int>(row) * (style.row_height + style.row_gap);
    for (const auto &seg : traces[row].segments) {
      SegmentRect r;
      r.row = row;
      r.label = seg.label;
      r.x0 = style.margin + seg.start * style.pixels_per_frame;
      r.x1 = r.x0 + seg.frames * style.pixels_per_frame;
      r.y0 = y0;
      r.y1 = y0 + style.row_height;
      r.color = label_color(seg.label);
      layout.rects.push_back(std::move(r));
    }
  }
  return layout;
}

PlotLayout plot_durations(const std::vector<DurationTrace> &traces,
                          const std::filesystem::path &png, const PlotStyle &style) {
  PlotLayout layout = layout_durations(traces, style);
  const auto w = static_cast<std::size_t>(layout.width);
  std::vector<std::uint8_t> pixels(w * static_cast<std::size_t>(layout.height) * 3, 255);
  for (const auto &r : layout.rects)
    for (int y = r.y0; y < r.y1; ++y)
      for (int x = r.x0; x < r.x1; ++x) {
        // One-pixel dark edge at each segment start.
        const bool edge = x == r.x0 && r.x1 - r.x0 > 2;
        auto *p = &pixels[(static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)) * 3];
        for (int c = 0; c < 3; ++c) p[c] = edge ? r.color[c] / 2 : r.color[c];
      }

  std::unique_ptr<FILE, int (*)(FILE *)> file(std::fopen(png.string().c_str(), "wb"), &std::fclose);
  if (!file) throw IoError("cannot write " + png.string());
  png_structp ptr = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = ptr ? png_create_info_struct(ptr) : nullptr;
  if (!ptr || !info) {
    png_destroy_write_struct(&ptr, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(ptr))) {
    png_destroy_write_struct(&ptr, &info);
    throw IoError("libpng failed writing " + png.string());
  }
  png_init_io(ptr, file.get());
  png_set_IHDR(ptr, info, static_cast<png_uint_32>(layout.width),
               static_cast<png_uint_32>(layout.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ptr, info);
  for (int y = 0; y < layout.height; ++y)
    png_write_row(ptr, &pixels[static_cast<std::size_t>(y) * w * 3]);
  png_write_end(ptr, nullptr);
  png_destroy_write_struct(&ptr, &info);
  return layout;
}

}  // namespace comedic
