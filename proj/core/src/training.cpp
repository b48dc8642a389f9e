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

#include "socrec/training.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "socrec/errors.hpp"

namespace socrec::training
{

using model::Scalar;
using model::Tensor;

namespace
{

constexpr std::pair<Strategy, std::string_view> kStrategyNames[] = {
  {Strategy::difficulty, "difficulty"},
  {Strategy::random, "random"},
  {Strategy::inverse, "inverse"},
  {Strategy::none, "none"},
  {Strategy::linear1, "linear1"},
  {Strategy::linear2, "linear2"},
  {Strategy::social_force, "social-force"},
  {Strategy::pretrained_recon, "pretrained-recon"},
  {Strategy::initial_aug, "initial-aug"},
};

bool uses_pseudo_trajectories(Strategy s)
{
  return s == Strategy::difficulty || s == Strategy::random || s == Strategy::inverse ||
         s == Strategy::initial_aug;
}

std::uint64_t u64(int epoch)
{
  return static_cast<std::uint64_t>(epoch);
}

}  // namespace

std::string_view to_string(Strategy s)
{
  for (const auto & [value, name] : kStrategyNames) {
    if (value == s) return name;
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name)
{
  for (const auto & [value, text] : kStrategyNames) {
    if (text == name) return value;
  }
  std::string known;
  for (const auto & kv : kStrategyNames) known += std::string(known.empty() ? "" : ", ") + std::string(kv.second);
  throw ConfigError("unknown augmentation strategy '" + std::string(name) + "' (expected one of " + known + ")");
}

void TrainConfig::validate() const
{
  hyper.validate();
  simulator.validate();
  if (n_epochs < 1) throw ConfigError("n_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (uses_pseudo_trajectories(strategy) && !reconstructor) {
    throw ConfigError(
      "augmentation strategy '" + std::string(to_string(strategy)) + "' needs the reconstructor");
  }
  if (strategy != Strategy::none) {
    if (hyper.threshold_epoch < 2) throw ConfigError("N_T must be >= 2 when augmenting");
    if (hyper.threshold_epoch >= n_epochs) {
      throw ConfigError(
        "N_T=" + std::to_string(hyper.threshold_epoch) + " must be below n_epochs=" + std::to_string(n_epochs) +
        " (use augmentation = none to train without refreshes)");
    }
  }
}

std::vector<int> TrainConfig::refresh_epochs() const
{
  std::vector<int> out;
  if (strategy == Strategy::none) return out;
  for (int e = hyper.threshold_epoch; e <= n_epochs; e += hyper.interval_epochs) {
    out.push_back(e);
    if (strategy == Strategy::initial_aug) break;
  }
  return out;
}

double scheduler_step(double initial_lr, int step, double gamma, int stepsize)
{
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("scheduler: gamma must lie in (0, 1]");
  if (stepsize < 1) throw std::invalid_argument("scheduler: stepsize must be >= 1");
  if (step < 0) throw std::invalid_argument("scheduler: negative step");
  return initial_lr * std::pow(gamma, step / stepsize);
}

void optimizer_step(
  nn::ParameterStore<Scalar> & params, const nn::GradientBuffer<Scalar> & grads, AdamState & state,
  double lr, const AdamConfig & config)
{
  if (grads.size() != params.size()) throw ShapeError("optimizer_step: gradient count differs from parameter count");
  if (!grads.all_finite()) throw std::invalid_argument("optimizer_step: non-finite gradient");
  if (state.m.empty()) {
    for (const auto & p : params) {
      state.m.emplace_back(p.value.rows(), p.value.cols());
      state.v.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("optimizer_step: state does not match parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor & w = params[i].value;
    const Tensor & g = grads[i];
    if (!w.same_shape(g) || !w.same_shape(state.m[i])) {
      throw ShapeError("optimizer_step: shape mismatch for " + params[i].name);
    }
    Tensor & m = state.m[i];
    Tensor & v = state.v[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j];
      const double mj = config.beta1 * m[j] + (1.0 - config.beta1) * gj;
      const double vj = config.beta2 * v[j] + (1.0 - config.beta2) * gj * gj;
      m[j] = static_cast<Scalar>(mj);
      v[j] = static_cast<Scalar>(vj);
      const double update = lr * (mj / c1) / (std::sqrt(vj / c2) + config.eps);
      w[j] = static_cast<Scalar>(w[j] - update);
    }
  }
}

TrainState initial_state(const TrainConfig & config)
{
  return TrainState{model::Model(config.hyper, config.seed), {}, {}, {}, 0, std::nullopt, {}};
}

namespace
{

Tensor standard_normal_noise(std::size_t rows, std::size_t cols, Rng & rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor out(rows, cols);
  for (auto & v : out.values()) v = static_cast<Scalar>(normal(rng));
  return out;
}

}  // namespace

SceneStep scene_step(
  const model::Model & model, const TrainConfig & config, const Scene & scene, std::size_t uid, int epoch,
  bool forecaster)
{
  const model::HyperParams & h = model.hyper();
  const std::uint64_t seed = config.seed;
  const std::size_t n = scene.agents();
  Rng rotation_rng = make_rng(seed, {tag(Stream::rotation), u64(epoch), uid});
  Rng dropout_rng = make_rng(seed, {tag(Stream::dropout), u64(epoch), uid});
  Rng latent_rng = make_rng(seed, {tag(Stream::latent), u64(epoch), uid});
  Rng masking_rng = make_rng(seed, {tag(Stream::masking), u64(epoch), uid});

  const Scene normalized = config.random_rotation ? data::normalize_scene(scene, rotation_rng).first
                                                  : data::normalize_scene(scene, 0.0).first;
  model::Graph g;
  model::ForwardContext ctx{g, model::Mode::training, &dropout_rng};
  const auto eps = static_cast<Scalar>(h.epsilon);

  losses::LossBreakdown parts;
  model::Var total = g.constant(Tensor(1, 1));
  // Overflowing activations surface as non-finite checks inside the model;
  // report them against the scene like any other divergence.
  try {
    if (forecaster) {
      const Tensor future = model::future_positions(normalized);
      const Tensor past = model::past_positions(normalized);
      Tensor last(n, 2);
      for (std::size_t a = 0; a < n; ++a) {
        last(a, 0) = past((Scene::kPastSteps - 1) * n + a, 0);
        last(a, 1) = past((Scene::kPastSteps - 1) * n + a, 1);
      }
      const auto features = model.encode(ctx, model::past_tokens(normalized), n);
      const auto prior = model.prior_params(ctx, features, n);
      const auto posterior = model.posterior_params_forecast(ctx, features, future, n);
      const auto z = nn::reparameterize(posterior, standard_normal_noise(n, h.d_latent, latent_rng));
      const auto pred = model.decode_future_teacher(ctx, features, z, last, future, n);
      const auto l_f = losses::forecast_loss(pred, future, posterior, prior);
      total = total + nn::scale(l_f, static_cast<Scalar>(h.w_forecast));
      parts.l_f = l_f.value()[0];
      if (config.social_loss) {
        const auto l_soc = losses::social_loss(pred, n, eps, config.social_loss_squared);
        total = total + nn::scale(l_soc, static_cast<Scalar>(h.w_social));
        parts.l_soc_f = l_soc.value()[0];
      }
    }
    if (config.reconstructor) {
      const data::MaskedPast masked = data::mask_past(normalized, h.mask_ratio, masking_rng);
      const Tensor tokens = model::past_tokens(masked);
      const auto features = model.encode(ctx, tokens, n);
      const auto posterior = model.posterior_params_recon(ctx, features, n);
      const auto z = nn::reparameterize(posterior, standard_normal_noise(n, h.d_latent, latent_rng));
      const auto recon = model.decode_reconstruction(ctx, features, tokens, z, n);
      const auto l_r = losses::recon_loss(recon, model::past_positions(normalized), posterior);
      total = total + nn::scale(l_r, static_cast<Scalar>(h.w_recon));
      parts.l_r = l_r.value()[0];
      if (config.social_loss) {
        const auto l_soc = losses::social_loss(recon, n, eps, config.social_loss_squared);
        total = total + nn::scale(l_soc, static_cast<Scalar>(h.w_social));
        parts.l_soc_r = l_soc.value()[0];
      }
    }
  } catch (const ShapeError &) {
    throw;
  } catch (const std::invalid_argument &) {
    throw NonFiniteLossError(uid, epoch);
  } catch (const std::domain_error &) {
    throw NonFiniteLossError(uid, epoch);
  }
  parts = losses::total_loss(parts, {forecaster ? h.w_forecast : 0.0, h.w_recon, h.w_social});
  if (!std::isfinite(parts.total) || !total.value().all_finite()) throw NonFiniteLossError(uid, epoch);

  SceneStep step{parts, nn::GradientBuffer<Scalar>(model.parameters())};
  g.backward(total, &step.grads);
  if (!step.grads.all_finite()) throw NonFiniteLossError(uid, epoch);
  return step;
}

namespace
{

/// One pass over `scenes` followed by `extra`, updating state.model and state.adam.
EpochRecord run_epoch(
  TrainState & state, const TrainConfig & config, const std::vector<Scene> & scenes,
  const std::vector<Scene> & extra, int epoch, bool forecaster, curriculum::DifficultyLedger * ledger)
{
  const auto start = std::chrono::steady_clock::now();
  const model::HyperParams & h = config.hyper;
  const double lr = scheduler_step(h.learning_rate, epoch - 1, h.gamma, h.step_size);
  std::vector<std::size_t> order(scenes.size() + extra.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.shuffle) {
    Rng rng = make_rng(config.seed, {tag(Stream::shuffle), u64(epoch)});
    std::shuffle(order.begin(), order.end(), rng);
  }

  losses::LossBreakdown sums;
  nn::GradientBuffer<Scalar> batch(state.model.parameters());
  for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
    const std::size_t end = std::min(order.size(), begin + config.batch_size);
    batch.zero();
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t uid = order[i];
      const Scene & scene = uid < scenes.size() ? scenes[uid] : extra[uid - scenes.size()];
      SceneStep step = scene_step(state.model, config, scene, uid, epoch, forecaster);
      batch.add(step.grads);
      sums.l_f += step.losses.l_f;
      sums.l_r += step.losses.l_r;
      sums.l_soc_f += step.losses.l_soc_f;
      sums.l_soc_r += step.losses.l_soc_r;
      sums.total += step.losses.total;
      if (ledger != nullptr && uid < scenes.size() && scene.source == data::SourceTag::real) {
        ledger->record(uid, epoch, step.losses.l_f);
      }
    }
    batch.scale(static_cast<Scalar>(1.0 / static_cast<double>(end - begin)));
    optimizer_step(state.model.parameters(), batch, state.adam, lr);
  }

  EpochRecord record;
  record.epoch = epoch;
  record.learning_rate = lr;
  record.scenes = order.size();
  const double count = static_cast<double>(order.size());
  record.losses = {sums.l_f / count, sums.l_r / count, sums.l_soc_f / count, sums.l_soc_r / count, sums.total / count};
  record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

model::Model pretrain_reconstructor(const TrainConfig & config, const std::vector<Scene> & scenes)
{
  TrainConfig recon_config = config;
  recon_config.reconstructor = true;
  TrainState state = initial_state(recon_config);
  for (int e = 1; e <= config.n_epochs; ++e) {
    run_epoch(state, recon_config, scenes, {}, e, false, nullptr);
  }
  return state.model;
}

void refresh(TrainState & state, const TrainConfig & config, const std::vector<Scene> & scenes, int epoch)
{
  const model::HyperParams & h = config.hyper;
  const std::vector<int> schedule = config.refresh_epochs();
  const bool first = !schedule.empty() && schedule.front() == epoch;
  const auto window = static_cast<std::size_t>(first ? h.threshold_epoch - 1 : h.interval_epochs);
  const std::vector<std::size_t> flagged = curriculum::difficulty_flags(state.ledger, h.difficulty_threshold, window);

  std::vector<std::size_t> chosen = flagged;
  if (config.strategy == Strategy::inverse) {
    chosen = curriculum::inverse_flags(state.ledger, h.difficulty_threshold, window);
  } else if (config.strategy == Strategy::random) {
    Rng rng = make_rng(config.seed, {tag(Stream::selection), u64(epoch)});
    chosen = curriculum::random_flags(state.ledger.samples(), flagged.size(), rng);
  }

  const model::Model & forecaster = state.model;
  const model::Model & reconstructor = state.frozen_reconstructor ? *state.frozen_reconstructor : state.model;
  curriculum::SceneGenerator generate;
  switch (config.strategy) {
    case Strategy::linear1:
    case Strategy::linear2: {
      const auto mode = config.strategy == Strategy::linear1 ? curriculum::LinearMode::first_two
                                                             : curriculum::LinearMode::last_two;
      generate = [mode](const Scene & s, std::size_t) { return std::optional<Scene>(curriculum::linear_extrapolate(s, mode)); };
      break;
    }
    case Strategy::social_force:
      generate = [&config](const Scene & s, std::size_t) {
        return std::optional<Scene>(curriculum::social_force_extrapolate(s, config.simulator));
      };
      break;
    default:
      generate = [&, epoch](const Scene & s, std::size_t id) {
        Rng rng = make_rng(config.seed, {tag(Stream::augment), u64(epoch), id});
        return curriculum::make_pseudo_trajectory(s, reconstructor, forecaster, h.mask_ratio, rng);
      };
  }
  state.pool = curriculum::refresh_pool(scenes, chosen, generate, state.ledger, epoch);
  state.report.refresh_epochs.push_back(epoch);
  state.report.pool_sizes.push_back(state.pool.scenes.size());
  state.report.rejected_pseudo += state.pool.rejected;
}

}  // namespace

TrainState train(
  const TrainConfig & config, const std::vector<Scene> & scenes, std::optional<TrainState> resume,
  const EpochCallback & on_epoch)
{
  config.validate();
  if (scenes.empty()) throw std::invalid_argument("train: empty dataset");
  for (const auto & s : scenes) s.validate();

  TrainConfig effective = config;
  if (config.strategy == Strategy::pretrained_recon) effective.reconstructor = false;

  TrainState state = resume ? std::move(*resume) : initial_state(config);
  if (!state.model.hyper().same_architecture(config.hyper)) {
    throw ConfigError("resumed model architecture does not match the configuration");
  }
  if (config.strategy == Strategy::pretrained_recon && !state.frozen_reconstructor) {
    state.frozen_reconstructor = pretrain_reconstructor(config, scenes);
  }
  const std::vector<int> schedule = config.refresh_epochs();

  for (int e = state.epoch + 1; e <= config.n_epochs; ++e) {
    const EpochRecord record = run_epoch(state, effective, scenes, state.pool.scenes, e, true, &state.ledger);
    state.report.epochs.push_back(record);
    state.epoch = e;
    state.model.set_epoch(e);
    if (std::find(schedule.begin(), schedule.end(), e) != schedule.end()) refresh(state, config, scenes, e);
    if (on_epoch) on_epoch(state);
  }
  return state;
}

void write_loss_log(std::ostream & out, const TrainReport & report)
{
  out << losses::kLossLogHeader << '\n';
  for (const auto & r : report.epochs) out << losses::loss_log_row(r.epoch, r.losses) << '\n';
}

std::string run_summary_json(const TrainConfig & config, const TrainReport & report, std::string_view metrics_json)
{
  using nlohmann::json;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  json j;
  j["config_hash"] = hash;
  j["seed"] = config.seed;
  j["strategy"] = std::string(to_string(config.strategy));
  j["epochs"] = report.epochs.size();
  j["refresh_epochs"] = report.refresh_epochs;
  j["pool_sizes"] = report.pool_sizes;
  j["rejected_pseudo"] = report.rejected_pseudo;
  j["checkpoint"] = report.checkpoint_path;
  if (!report.epochs.empty()) {
    const auto & l = report.epochs.back().losses;
    j["final_losses"] = {{"l_f", l.l_f}, {"l_r", l.l_r}, {"l_soc_f", l.l_soc_f}, {"l_soc_r", l.l_soc_r}, {"total", l.total}};
  }
  j["final_metrics"] = metrics_json.empty() ? json(nullptr) : json::parse(metrics_json);
  return j.dump(2);
}

}  // namespace socrec::training
