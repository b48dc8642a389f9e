// Copyright 2026 The socrec Authors
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

#include "socrec/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "socrec/errors.hpp"

namespace socrec::data
{

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double squared_distance(Vec2 a, Vec2 b)
{
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::string_view to_string(SourceTag tag)
{
  switch (tag) {
    case SourceTag::real:
      return "real";
    case SourceTag::pseudo:
      return "pseudo";
    case SourceTag::baseline_aug:
      return "baseline-aug";
  }
  return "unknown";
}

void Scene::validate() const
{
  if (ped_ids.empty()) throw std::invalid_argument("scene has no pedestrians");
  if (positions.size() != ped_ids.size() * kTotalSteps) {
    throw std::invalid_argument(
      "scene stores " + std::to_string(positions.size()) + " positions for " +
      std::to_string(ped_ids.size()) + " pedestrians");
  }
  for (const Vec2 & p : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("scene contains a non-finite position");
    }
  }
}

Scene make_scene(std::vector<std::int64_t> ped_ids, std::vector<Vec2> positions, SourceTag source)
{
  Scene s;
  s.ped_ids = std::move(ped_ids);
  s.positions = std::move(positions);
  s.source = source;
  s.validate();
  return s;
}

std::size_t MaskedPast::masked_count() const
{
  return static_cast<std::size_t>(std::count(indicator.begin(), indicator.end(), 1));
}

Vec2 SceneTransform::apply(Vec2 p) const
{
  const double c = std::cos(rotation), s = std::sin(rotation);
  const Vec2 d = p - translation;
  return {c * d.x - s * d.y, s * d.x + c * d.y};
}

Vec2 SceneTransform::invert(Vec2 p) const
{
  const double c = std::cos(rotation), s = std::sin(rotation);
  return Vec2{c * p.x + s * p.y, -s * p.x + c * p.y} + translation;
}

// ---- parsing ----------------------------------------------------------------

namespace
{

bool parse_number(std::string_view text, double & out)
{
  const char * first = text.data();
  const char * last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::int64_t parse_id(std::string_view text, std::size_t line, const char * what)
{
  double v = 0.0;
  if (!parse_number(text, v)) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(text) + "'");
  }
  if (!std::isfinite(v) || v < 0.0 || v != std::floor(v)) {
    throw ParseError(line, std::string(what) + " must be a non-negative integer, got '" + std::string(text) + "'");
  }
  return static_cast<std::int64_t>(v);
}

double parse_coordinate(std::string_view text, std::size_t line)
{
  double v = 0.0;
  if (!parse_number(text, v) || !std::isfinite(v)) {
    throw ParseError(line, "non-numeric coordinate '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::vector<TrackRecord> parse_trajectory_file(std::istream & in)
{
  std::vector<TrackRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 4) {
      throw ParseError(line_no, "expected 4 fields (frame ped x y), got " + std::to_string(tokens.size()));
    }
    TrackRecord r;
    r.frame_id = parse_id(tokens[0], line_no, "frame id");
    r.ped_id = parse_id(tokens[1], line_no, "pedestrian id");
    r.x = parse_coordinate(tokens[2], line_no);
    r.y = parse_coordinate(tokens[3], line_no);
    records.push_back(r);
  }
  return records;
}

std::vector<TrackRecord> read_trajectory_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_trajectory_file(in);
}

std::vector<Scene> build_scenes(const std::vector<TrackRecord> & records, std::int64_t frame_stride)
{
  if (frame_stride <= 0) throw std::invalid_argument("frame stride must be positive");
  std::vector<Scene> scenes;
  if (records.empty()) return scenes;

  std::map<std::int64_t, std::map<std::int64_t, Vec2>> by_frame;
  for (const auto & r : records) by_frame[r.frame_id][r.ped_id] = Vec2{r.x, r.y};

  const std::int64_t first = by_frame.begin()->first;
  const std::int64_t last = by_frame.rbegin()->first;
  const std::int64_t span = static_cast<std::int64_t>(Scene::kTotalSteps - 1) * frame_stride;

  for (std::int64_t start = first; start + span <= last; start += frame_stride) {
    const auto head = by_frame.find(start);
    if (head == by_frame.end()) continue;
    std::vector<std::int64_t> peds;
    for (const auto & [ped, pos] : head->second) peds.push_back(ped);
    std::vector<const std::map<std::int64_t, Vec2> *> frames;
    frames.reserve(Scene::kTotalSteps);
    for (std::size_t t = 0; t < Scene::kTotalSteps && !peds.empty(); ++t) {
      const auto it = by_frame.find(start + static_cast<std::int64_t>(t) * frame_stride);
      if (it == by_frame.end()) {
        peds.clear();
        break;
      }
      frames.push_back(&it->second);
      std::erase_if(peds, [&](std::int64_t p) { return it->second.count(p) == 0; });
    }
    if (peds.empty()) continue;

    Scene s;
    s.start_frame = start;
    s.ped_ids = peds;
    s.positions.resize(peds.size() * Scene::kTotalSteps);
    for (std::size_t a = 0; a < peds.size(); ++a) {
      for (std::size_t t = 0; t < Scene::kTotalSteps; ++t) s.at(a, t) = frames[t]->at(peds[a]);
    }
    scenes.push_back(std::move(s));
  }
  return scenes;
}

// ---- geometry ---------------------------------------------------------------

Scene apply_transform(const Scene & scene, const SceneTransform & transform)
{
  Scene out = scene;
  for (Vec2 & p : out.positions) p = transform.apply(p);
  return out;
}

Scene invert_transform(const Scene & scene, const SceneTransform & transform)
{
  Scene out = scene;
  for (Vec2 & p : out.positions) p = transform.invert(p);
  return out;
}

std::pair<Scene, SceneTransform> normalize_scene(const Scene & scene, double rotation)
{
  scene.validate();
  Vec2 centroid;
  for (std::size_t a = 0; a < scene.agents(); ++a) {
    for (std::size_t t = 0; t < Scene::kPastSteps; ++t) centroid = centroid + scene.at(a, t);
  }
  centroid = (1.0 / static_cast<double>(scene.agents() * Scene::kPastSteps)) * centroid;
  SceneTransform transform{centroid, rotation};
  return {apply_transform(scene, transform), transform};
}

std::pair<Scene, SceneTransform> normalize_scene(const Scene & scene, Rng & rng)
{
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double theta = angle(rng);
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return normalize_scene(scene, theta);
}

std::size_t masked_cell_count(std::size_t cells, double percent)
{
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw std::invalid_argument("masking ratio must lie in [0, 100]");
  }
  return static_cast<std::size_t>(std::floor(percent * static_cast<double>(cells) / 100.0 + 0.5));
}

MaskedPast mask_past(const Scene & scene, double percent, Rng & rng)
{
  const std::size_t cells = scene.agents() * Scene::kPastSteps;
  const std::size_t count = masked_cell_count(cells, percent);
  MaskedPast out;
  out.agents = scene.agents();
  out.positions.resize(cells);
  out.indicator.assign(cells, 0);
  for (std::size_t a = 0; a < scene.agents(); ++a) {
    for (std::size_t t = 0; t < Scene::kPastSteps; ++t) {
      out.positions[a * Scene::kPastSteps + t] = scene.at(a, t);
    }
  }
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates: the first `count` slots become a uniform subset.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cells - 1);
    std::swap(order[i], order[pick(rng)]);
    out.indicator[order[i]] = 1;
    out.positions[order[i]] = Vec2{};
  }
  return out;
}

// ---- dataset files ----------------------------------------------------------

std::string format_double(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

void write_dataset(std::ostream & out, const std::vector<Scene> & scenes, std::int64_t frame_stride)
{
  if (frame_stride <= 0) throw std::invalid_argument("frame stride must be positive");
  out << kDatasetHeader << '\n';
  std::int64_t next_ped = 0;
  const auto block = static_cast<std::int64_t>(Scene::kTotalSteps) * frame_stride;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const Scene & scene = scenes[s];
    scene.validate();
    out << "# scene " << s << " source=" << to_string(scene.source)
        << " start_frame=" << scene.start_frame << " ped_ids=";
    for (std::size_t a = 0; a < scene.agents(); ++a) out << (a ? "," : "") << scene.ped_ids[a];
    out << '\n';
    const std::int64_t base = static_cast<std::int64_t>(s) * block;
    for (std::size_t t = 0; t < Scene::kTotalSteps; ++t) {
      for (std::size_t a = 0; a < scene.agents(); ++a) {
        const Vec2 & p = scene.at(a, t);
        out << base + static_cast<std::int64_t>(t) * frame_stride << ' '
            << next_ped + static_cast<std::int64_t>(a) << ' ' << format_double(p.x) << ' '
            << format_double(p.y) << '\n';
      }
    }
    next_ped += static_cast<std::int64_t>(scene.agents());
  }
}

void save_dataset(const std::filesystem::path & path, const std::vector<Scene> & scenes, std::int64_t frame_stride)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset(out, scenes, frame_stride);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<Scene> load_scenes(const std::filesystem::path & path, std::int64_t frame_stride)
{
  return build_scenes(read_trajectory_file(path), frame_stride);
}

}  // namespace socrec::data
