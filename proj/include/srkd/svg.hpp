// Copyright 2026 The SRKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRKD_SVG_HPP_
#define SRKD_SVG_HPP_

#include <string>
#include <utility>
#include <vector>

namespace srkd {

// Minimal fixed-layout SVG line chart. Output depends only on the inputs
// (fixed number formatting), so identical data gives identical files.
class SvgLineChart {
 public:
  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
  };

  SvgLineChart(std::string title, std::string x_label, std::string y_label);

  void set_y_range(double lo, double hi);
  void add_series(Series series);

  std::string render() const;

 private:
  std::string title_;
  std::string x_label_;
  std::string y_label_;
  bool fixed_y_ = false;
  double y_lo_ = 0.0;
  double y_hi_ = 1.0;
  std::vector<Series> series_;
};

std::string xml_escape(const std::string& text);

}  // namespace srkd

#endif  // SRKD_SVG_HPP_
