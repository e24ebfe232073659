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

#ifndef SRKD_EVENTS_HPP_
#define SRKD_EVENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "srkd/tensor.hpp"

namespace srkd {

struct EventRecord {
  std::uint64_t t = 0;  // microseconds
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint8_t polarity = 0;  // 0 or 1

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventStream {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<EventRecord> events;
};

enum class FrameNormalization { kPerBinMax, kRaw };

// Bins [0, T * window) into T frames of shape [2,height,width]; cell
// [t,p,y,x] counts events of polarity p at (x,y) with t*window <= ts <
// (t+1)*window. Events past the span are dropped. kPerBinMax divides each
// frame by its largest count. Events must be time-sorted.
Tensor integrate_events(const std::vector<EventRecord>& events, std::size_t width, std::size_t height,
                        std::size_t timesteps, std::uint64_t window,
                        FrameNormalization norm = FrameNormalization::kPerBinMax);

// Reads `t,x,y,polarity` lines (a non-numeric first line is treated as a
// header) plus the JSON sidecar {"width":W,"height":H}. The sidecar path
// defaults to the CSV path with its extension replaced by ".json".
EventStream read_event_csv(const std::string& csv_path, const std::string& sidecar_path = "");
void write_event_csv(const EventStream& stream, const std::string& csv_path,
                     const std::string& sidecar_path = "");

}  // namespace srkd

#endif  // SRKD_EVENTS_HPP_
