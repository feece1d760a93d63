// Copyright 2026 The infoprocure Authors.
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

// Minimal static SVG plots. They only visualize the result tables.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace infoprocure::cli::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Highlighted point (e.g. an argmax), drawn as a filled circle.
  std::optional<double> mark_x;
};

struct LinePanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_x = false;
  /// Dashed vertical reference line.
  std::optional<double> reference_x;
  /// Dashed horizontal reference line.
  std::optional<double> reference_y;
};

struct HeatPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> xs;
  std::vector<double> ys;
  /// values[iy * xs.size() + ix]; positive is drawn green, negative grey.
  std::vector<double> values;
};

std::string render_lines(const std::string& title, const std::vector<LinePanel>& panels,
                         int columns);

std::string render_heat(const std::string& title, const std::vector<HeatPanel>& panels);

}  // namespace infoprocure::cli::svg
