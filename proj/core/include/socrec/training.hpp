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

#ifndef SOCREC__TRAINING_HPP_
#define SOCREC__TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socrec/curriculum.hpp"
#include "socrec/data.hpp"
#include "socrec/losses.hpp"
#include "socrec/model.hpp"
#include "socrec/synth.hpp"

namespace socrec::training
{

using data::Scene;

/// Which scenes are added to the training set at each refresh.
enum class Strategy {
  difficulty,        // pseudo-trajectories of samples whose loss rarely fell
  random,            // pseudo-trajectories of randomly chosen samples
  inverse,           // pseudo-trajectories of samples whose loss mostly fell
  none,              // no augmentation
  linear1,           // constant velocity from the first two past steps
  linear2,           // constant velocity from the last two past steps
  social_force,      // crowd-simulator futures
  pretrained_recon,  // difficulty, with a reconstructor trained beforehand and frozen
  initial_aug,       // difficulty, generated once at N_T and kept
};

std::string_view to_string(Strategy s);
/// Accepts the names printed by to_string(); throws ConfigError otherwise.
Strategy parse_strategy(std::string_view name);

struct TrainConfig
{
  model::HyperParams hyper;
  int n_epochs = 100;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> data_paths;
  std::string holdout_path;
  bool social_loss = true;
  bool social_loss_squared = true;  // compare epsilon against squared distance
  bool reconstructor = true;
  bool shuffle = true;
  bool random_rotation = true;  // rotate each training scene by a random angle
  Strategy strategy = Strategy::difficulty;
  data::SynthConfig simulator;  // dynamics for the social-force strategy

  /// Throws ConfigError.
  void validate() const;
  /// Epochs at which the pool is refreshed: N_T, N_T + N_Int, ... <= n_epochs.
  std::vector<int> refresh_epochs() const;
};

/// Reads `key = value` lines; '#' starts a comment. Unknown keys are errors.
/// `seed_given` reports whether the text set a seed.
TrainConfig parse_train_config(std::istream & in, bool * seed_given = nullptr);
TrainConfig load_train_config(const std::filesystem::path & path, bool * seed_given = nullptr);
/// Canonical text form; parse_train_config() reads it back to an equal config.
std::string train_config_text(const TrainConfig & config);
/// FNV-1a of the canonical text.
std::uint64_t config_hash(const TrainConfig & config);

/// Simulator settings; a `seed` key is reported through `seed` when given.
data::SynthConfig parse_synth_config(std::istream & in, std::optional<std::uint64_t> * seed = nullptr);
data::SynthConfig load_synth_config(
  const std::filesystem::path & path, std::optional<std::uint64_t> * seed = nullptr);

/// lr0 * gamma^floor(step / stepsize).
double scheduler_step(double initial_lr, int step, double gamma, int stepsize);

struct AdamConfig
{
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState
{
  std::vector<model::Tensor> m;
  std::vector<model::Tensor> v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update. Throws std::invalid_argument on non-finite gradients.
void optimizer_step(
  nn::ParameterStore<model::Scalar> & params, const nn::GradientBuffer<model::Scalar> & grads,
  AdamState & state, double lr, const AdamConfig & config = {});

struct EpochRecord
{
  int epoch = 0;
  losses::LossBreakdown losses;  // mean over the scenes visited
  double learning_rate = 0.0;
  double seconds = 0.0;
  std::size_t scenes = 0;
};

struct TrainReport
{
  std::vector<EpochRecord> epochs;
  std::vector<int> refresh_epochs;
  std::vector<std::size_t> pool_sizes;
  std::size_t rejected_pseudo = 0;
  std::string checkpoint_path;
};

struct TrainState
{
  model::Model model;
  AdamState adam;
  curriculum::DifficultyLedger ledger;
  curriculum::AugmentationPool pool;
  int epoch = 0;  // last completed epoch
  std::optional<model::Model> frozen_reconstructor;
  TrainReport report;
};

TrainState initial_state(const TrainConfig & config);

/// Losses of one training step on one scene plus the gradient it produced.
struct SceneStep
{
  losses::LossBreakdown losses;
  nn::GradientBuffer<model::Scalar> grads;
};

/**
 * @brief Forward and backward pass of the joint objective on one scene.
 *
 * `uid` and `epoch` select the rotation, latent-noise, masking and dropout
 * streams. Throws NonFiniteLossError.
 */
SceneStep scene_step(
  const model::Model & model, const TrainConfig & config, const Scene & scene, std::size_t uid,
  int epoch, bool forecaster = true);

using EpochCallback = std::function<void(const TrainState &)>;

/**
 * @brief Runs epochs state.epoch + 1 ... n_epochs.
 *
 * Without `resume` a fresh state is used; the pretrained-recon strategy then
 * first trains a reconstructor alone for n_epochs. The callback runs after
 * every epoch, including refreshes.
 */
TrainState train(
  const TrainConfig & config, const std::vector<Scene> & scenes, std::optional<TrainState> resume = {},
  const EpochCallback & on_epoch = {});

/// Binary checkpoint of the full training state.
void save_checkpoint(std::ostream & out, const TrainState & state, const TrainConfig & config);
void save_checkpoint(const std::filesystem::path & path, const TrainState & state, const TrainConfig & config);

struct Checkpoint
{
  TrainConfig config;
  TrainState state;
};

/// Throws ParseError on malformed or truncated input.
Checkpoint load_checkpoint(std::istream & in);
Checkpoint load_checkpoint(const std::filesystem::path & path);

/// Per-epoch CSV (losses header).
void write_loss_log(std::ostream & out, const TrainReport & report);

/// JSON run summary; `metrics_json` (already JSON) is embedded when given.
std::string run_summary_json(
  const TrainConfig & config, const TrainReport & report, std::string_view metrics_json = {});

}  // namespace socrec::training

#endif  // SOCREC__TRAINING_HPP_
