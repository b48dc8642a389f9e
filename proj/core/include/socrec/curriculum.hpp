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

#ifndef SOCREC__CURRICULUM_HPP_
#define SOCREC__CURRICULUM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "socrec/data.hpp"
#include "socrec/model.hpp"
#include "socrec/random.hpp"
#include "socrec/synth.hpp"

namespace socrec::curriculum
{

using data::Scene;

/// Losses are floored here before taking log ratios.
inline constexpr double kLossFloor = 1e-12;

struct LossDelta
{
  double descent = 0.0;  // d: positive when the loss went down
  double ascent = 0.0;   // a: positive when the loss went up
};

/// d = min(dl, 0) * ln(curr / prev), a = max(dl, 0) * ln(curr / prev).
LossDelta loss_deltas(double previous, double current);

/**
 * @brief Per-sample forecaster loss history over the current window.
 *
 * clear() drops everything except each sample's latest loss, which becomes
 * the baseline for the next window's first delta.
 */
class DifficultyLedger
{
public:
  struct Entry
  {
    int epoch = 0;
    double loss = 0.0;
    friend bool operator==(const Entry &, const Entry &) = default;
  };

  void record(std::size_t sample, int epoch, double loss);
  void clear();

  const std::vector<Entry> & history(std::size_t sample) const;
  /// Number of deltas in the history with d > a.
  std::size_t count(std::size_t sample) const { return stats(sample).descending; }
  /// Number of deltas in the history with d < a.
  std::size_t inverse_count(std::size_t sample) const { return stats(sample).ascending; }
  std::size_t deltas(std::size_t sample) const;

  /// Tracked sample ids in increasing order.
  std::vector<std::size_t> samples() const;
  bool empty() const { return history_.empty(); }
  const std::map<std::size_t, std::vector<Entry>> & entries() const { return history_; }

  /// Rebuilds a ledger (including running counts) from saved histories.
  static DifficultyLedger from_entries(const std::map<std::size_t, std::vector<Entry>> & entries);

  friend bool operator==(const DifficultyLedger & a, const DifficultyLedger & b)
  {
    return a.history_ == b.history_;
  }

private:
  struct Counts
  {
    std::size_t descending = 0;
    std::size_t ascending = 0;
  };
  const Counts & stats(std::size_t sample) const;

  std::map<std::size_t, std::vector<Entry>> history_;
  std::map<std::size_t, Counts> counts_;
};

/// Samples whose last `window` deltas descended fewer than D * window times.
/// Throws std::invalid_argument naming a sample with fewer than window + 1 losses.
std::vector<std::size_t> difficulty_flags(const DifficultyLedger & ledger, double threshold, std::size_t window);
/// As difficulty_flags with the indicator reversed: counts ascending deltas.
std::vector<std::size_t> inverse_flags(const DifficultyLedger & ledger, double threshold, std::size_t window);
/// `count` ids drawn uniformly without replacement, returned sorted.
std::vector<std::size_t> random_flags(const std::vector<std::size_t> & ids, std::size_t count, Rng & rng);

/**
 * @brief Reconstructs a masked copy of the past and forecasts from it.
 *
 * Both latents are posterior/prior means. Returns nullopt when the model
 * produces non-finite values.
 */
std::optional<Scene> make_pseudo_trajectory(
  const Scene & scene, const model::Model & model, double mask_percent, Rng & rng);
/// As above with the past reconstructed by one model and forecast by another.
std::optional<Scene> make_pseudo_trajectory(
  const Scene & scene, const model::Model & reconstructor, const model::Model & forecaster,
  double mask_percent, Rng & rng);

enum class LinearMode { first_two, last_two };

/// Continues each agent at the velocity of its first or last two past steps.
Scene linear_extrapolate(const Scene & scene, LinearMode mode);

/// Replaces the future with a crowd-simulator rollout started from the last
/// observed position and velocity of every agent.
Scene social_force_extrapolate(const Scene & scene, const data::SynthConfig & config);

struct AugmentationPool
{
  std::vector<Scene> scenes;
  std::vector<std::size_t> source_ids;  // training-set index each scene came from
  int generation_epoch = 0;
  std::size_t rejected = 0;
};

/// Builds one augmented scene for training sample `id`; nullopt rejects it.
using SceneGenerator = std::function<std::optional<Scene>(const Scene & scene, std::size_t id)>;

/**
 * @brief Replaces the pool with one generated scene per flagged sample.
 *
 * Only real samples are used; others are skipped. The ledger is cleared.
 */
AugmentationPool refresh_pool(
  const std::vector<Scene> & trainset, const std::vector<std::size_t> & flagged,
  const SceneGenerator & generate, DifficultyLedger & ledger, int epoch);

/// Writes the pool in the dataset text format preceded by a comment listing
/// the flagged ids.
void write_pool(std::ostream & out, const AugmentationPool & pool);

}  // namespace socrec::curriculum

#endif  // SOCREC__CURRICULUM_HPP_
