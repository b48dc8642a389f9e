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

#ifndef SOCREC__DATA_HPP_
#define SOCREC__DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "socrec/random.hpp"

namespace socrec::data
{

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2 &, const Vec2 &) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double norm(Vec2 v);
double squared_distance(Vec2 a, Vec2 b);

/// One line of an ETH/UCY-style trajectory file.
struct TrackRecord
{
  std::int64_t frame_id = 0;
  std::int64_t ped_id = 0;
  double x = 0.0;
  double y = 0.0;
};

enum class SourceTag { real, pseudo, baseline_aug };

std::string_view to_string(SourceTag tag);

/**
 * @brief A 20-step window of N fully observed pedestrians.
 *
 * Positions are stored agent-major: positions[agent * 20 + t].
 */
struct Scene
{
  static constexpr std::size_t kPastSteps = 8;
  static constexpr std::size_t kFutureSteps = 12;
  static constexpr std::size_t kTotalSteps = kPastSteps + kFutureSteps;

  std::vector<std::int64_t> ped_ids;
  std::vector<Vec2> positions;
  std::int64_t start_frame = 0;
  SourceTag source = SourceTag::real;

  std::size_t agents() const { return ped_ids.size(); }
  Vec2 & at(std::size_t agent, std::size_t t) { return positions[agent * kTotalSteps + t]; }
  const Vec2 & at(std::size_t agent, std::size_t t) const
  {
    return positions[agent * kTotalSteps + t];
  }

  /// Throws std::invalid_argument unless N >= 1 and every position is finite.
  void validate() const;
};

/// Builds a scene from agent-major positions.
Scene make_scene(std::vector<std::int64_t> ped_ids, std::vector<Vec2> positions, SourceTag source = SourceTag::real);

/// Past positions with a share of (agent, timestep) cells zeroed out.
struct MaskedPast
{
  std::size_t agents = 0;
  std::vector<Vec2> positions;          // agent * 8 + t
  std::vector<unsigned char> indicator;  // 1 = masked

  std::size_t masked_count() const;
};

/// p' = Rot(rotation) * (p - translation).
struct SceneTransform
{
  Vec2 translation;
  double rotation = 0.0;

  Vec2 apply(Vec2 p) const;
  Vec2 invert(Vec2 p) const;
};

/// Parses whitespace-separated "frame ped x y" lines. Lines starting with '#'
/// and blank lines are skipped. Throws ParseError naming the offending line.
std::vector<TrackRecord> parse_trajectory_file(std::istream & in);
std::vector<TrackRecord> read_trajectory_file(const std::filesystem::path & path);

/// Sliding windows of 20 sampled frames (spacing `frame_stride`), advancing
/// one sampled frame at a time. Agents are ordered by ped id.
std::vector<Scene> build_scenes(const std::vector<TrackRecord> & records, std::int64_t frame_stride);

/// Centers on the past centroid and rotates by `rotation` radians.
std::pair<Scene, SceneTransform> normalize_scene(const Scene & scene, double rotation);
/// As above with a rotation drawn uniformly from [0, 2*pi).
std::pair<Scene, SceneTransform> normalize_scene(const Scene & scene, Rng & rng);
Scene apply_transform(const Scene & scene, const SceneTransform & transform);
Scene invert_transform(const Scene & scene, const SceneTransform & transform);

/// round-half-up(percent / 100 * cells).
std::size_t masked_cell_count(std::size_t cells, double percent);
MaskedPast mask_past(const Scene & scene, double percent, Rng & rng);

inline constexpr std::string_view kDatasetHeader = "# socrec-dataset v1";

/**
 * @brief Writes scenes as trajectory records under the dataset header.
 *
 * Scene s occupies its own block of 20 frames and fresh ped ids, so reading
 * the file back with build_scenes() yields exactly the written windows. A
 * comment line before each block records the source tag and original ids.
 */
void write_dataset(std::ostream & out, const std::vector<Scene> & scenes, std::int64_t frame_stride = 10);
void save_dataset(const std::filesystem::path & path, const std::vector<Scene> & scenes, std::int64_t frame_stride = 10);
std::vector<Scene> load_scenes(const std::filesystem::path & path, std::int64_t frame_stride = 10);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace socrec::data

#endif  // SOCREC__DATA_HPP_
