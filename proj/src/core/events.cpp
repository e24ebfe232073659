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

#include "srkd/events.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>
#include <string>

#include "binary_io.hpp"
#include "json.hpp"
#include "srkd/error.hpp"

namespace srkd {

Tensor integrate_events(const std::vector<EventRecord>& events, std::size_t width, std::size_t height,
                        std::size_t timesteps, std::uint64_t window, FrameNormalization norm) {
  if (timesteps == 0) fail(ErrorKind::kParameter, "timesteps must be >= 1");
  if (window == 0) fail(ErrorKind::kParameter, "bin window must be > 0");
  if (width == 0 || height == 0) fail(ErrorKind::kParameter, "frame size must be positive");
  Tensor frames({timesteps, 2, height, width});
  const std::uint64_t span = window * timesteps;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const EventRecord& e = events[i];
    if (i > 0 && e.t < events[i - 1].t) {
      fail(ErrorKind::kFormat, "events not time-sorted at index " + std::to_string(i));
    }
    if (e.x >= width || e.y >= height) {
      fail(ErrorKind::kFormat, "event " + std::to_string(i) + " outside the " + std::to_string(width) + "x" +
                                   std::to_string(height) + " frame");
    }
    if (e.polarity > 1) fail(ErrorKind::kFormat, "event " + std::to_string(i) + " has polarity > 1");
    if (e.t >= span) continue;
    const std::size_t bin = static_cast<std::size_t>(e.t / window);
    frames[((bin * 2 + e.polarity) * height + e.y) * width + e.x] += 1.0;
  }
  if (norm == FrameNormalization::kPerBinMax) {
    const std::size_t per_bin = 2 * height * width;
    for (std::size_t b = 0; b < timesteps; ++b) {
      auto first = frames.data().begin() + static_cast<std::ptrdiff_t>(b * per_bin);
      auto last = first + static_cast<std::ptrdiff_t>(per_bin);
      const double peak = *std::max_element(first, last);
      if (peak > 0.0) {
        for (auto it = first; it != last; ++it) *it /= peak;
      }
    }
  }
  return frames;
}

namespace {

std::string default_sidecar(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

template <typename T>
bool parse_field(std::string_view s, T& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EventStream read_event_csv(const std::string& csv_path, const std::string& sidecar_path) {
  const std::string sidecar = sidecar_path.empty() ? default_sidecar(csv_path) : sidecar_path;
  EventStream stream;
  try {
    const auto meta = nlohmann::json::parse(detail::read_file_text(sidecar));
    stream.width = meta.at("width").get<std::size_t>();
    stream.height = meta.at("height").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, "event sidecar '" + sidecar + "': " + e.what());
  }
  if (stream.width == 0 || stream.height == 0) fail(ErrorKind::kFormat, "event sidecar declares an empty frame");

  std::istringstream in(detail::read_file_text(csv_path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    EventRecord e;
    unsigned pol = 0;
    const bool ok = fields.size() == 4 && parse_field(fields[0], e.t) && parse_field(fields[1], e.x) &&
                    parse_field(fields[2], e.y) && parse_field(fields[3], pol);
    if (!ok) {
      if (lineno == 1 && stream.events.empty()) continue;  // header
      fail(ErrorKind::kFormat, csv_path + ":" + std::to_string(lineno) + ": expected t,x,y,polarity");
    }
    if (pol > 1) fail(ErrorKind::kFormat, csv_path + ":" + std::to_string(lineno) + ": polarity must be 0 or 1");
    if (e.x >= stream.width || e.y >= stream.height) {
      fail(ErrorKind::kFormat, csv_path + ":" + std::to_string(lineno) + ": coordinate outside declared frame");
    }
    if (!stream.events.empty() && e.t < stream.events.back().t) {
      fail(ErrorKind::kFormat, csv_path + ":" + std::to_string(lineno) + ": timestamps decrease");
    }
    e.polarity = static_cast<std::uint8_t>(pol);
    stream.events.push_back(e);
  }
  return stream;
}

void write_event_csv(const EventStream& stream, const std::string& csv_path, const std::string& sidecar_path) {
  std::ostringstream os;
  os << "t,x,y,polarity\n";
  for (const EventRecord& e : stream.events) {
    os << e.t << ',' << e.x << ',' << e.y << ',' << static_cast<unsigned>(e.polarity) << '\n';
  }
  detail::write_file_text(csv_path, os.str());
  const nlohmann::json meta = {{"width", stream.width}, {"height", stream.height}};
  detail::write_file_text(sidecar_path.empty() ? default_sidecar(csv_path) : sidecar_path, meta.dump(2) + "\n");
}

}  // namespace srkd
