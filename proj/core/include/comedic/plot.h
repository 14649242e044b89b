// core/include/comedic/plot.h
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

#pragma once

// Stacked duration-segment chart: one row per trace, one coloured bar per
// phoneme, width proportional to frames, colour keyed by label.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "comedic/synthesis.h"

namespace comedic {

struct SegmentRect {
  std::size_t row = 0;
  std::string label;
  int x0 = 0;  // pixels, inclusive
  int x1 = 0;  // pixels, exclusive
  int y0 = 0;
  int y1 = 0;
  std::array<std::uint8_t, 3> color{};
};

struct PlotLayout {
  int width = 0;
  int height = 0;
  double pixels_per_frame = 0.0;
  std::vector<SegmentRect> rects;
};

struct PlotStyle {
  int pixels_per_frame = 4;
  int row_height = 24;
  int row_gap = 8;
  int margin = 10;
};

std::array<std::uint8_t, 3> label_color(std::string_view label);

PlotLayout layout_durations(const std::vector<DurationTrace> &traces, const PlotStyle &style = {});
/// Renders layout_durations() to a PNG.
PlotLayout plot_durations(const std::vector<DurationTrace> &traces,
                          const std::filesystem::path &png, const PlotStyle &style = {});

}  // namespace comedic
