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

#include "socrec/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace socrec::curriculum
{

LossDelta loss_deltas(double previous, double current)
{
  const double prev = std::max(previous, kLossFloor);
  const double curr = std::max(current, kLossFloor);
  const double change = curr - prev;
  const double log_ratio = std::log(curr / prev);
  return {std::min(change, 0.0) * log_ratio, std::max(change, 0.0) * log_ratio};
}

void DifficultyLedger::record(std::size_t sample, int epoch, double loss)
{
  auto & h = history_[sample];
  auto & c = counts_[sample];
  if (!h.empty()) {
    const LossDelta d = loss_deltas(h.back().loss, loss);
    if (d.descent > d.ascent) ++c.descending;
    if (d.descent < d.ascent) ++c.ascending;
  }
  h.push_back({epoch, loss});
}

void DifficultyLedger::clear()
{
  for (auto & [sample, h] : history_) {
    h.erase(h.begin(), h.end() - 1);
    counts_[sample] = {};
  }
}

const std::vector<DifficultyLedger::Entry> & DifficultyLedger::history(std::size_t sample) const
{
  static const std::vector<Entry> none;
  const auto it = history_.find(sample);
  return it == history_.end() ? none : it->second;
}

const DifficultyLedger::Counts & DifficultyLedger::stats(std::size_t sample) const
{
  static const Counts none;
  const auto it = counts_.find(sample);
  return it == counts_.end() ? none : it->second;
}

std::size_t DifficultyLedger::deltas(std::size_t sample) const
{
  const auto & h = history(sample);
  return h.empty() ? 0 : h.size() - 1;
}

std::vector<std::size_t> DifficultyLedger::samples() const
{
  std::vector<std::size_t> ids;
  ids.reserve(history_.size());
  for (const auto & kv : history_) ids.push_back(kv.first);
  return ids;
}

DifficultyLedger DifficultyLedger::from_entries(const std::map<std::size_t, std::vector<Entry>> & entries)
{
  DifficultyLedger ledger;
  for (const auto & [sample, h] : entries) {
    for (const auto & e : h) ledger.record(sample, e.epoch, e.loss);
  }
  return ledger;
}

namespace
{

std::vector<std::size_t> flags_by_count(
  const DifficultyLedger & ledger, double threshold, std::size_t window, bool inverse)
{
  if (window == 0) throw std::invalid_argument("flagging window must be >= 1");
  std::vector<std::size_t> flagged;
  const double limit = threshold * static_cast<double>(window);
  for (std::size_t sample : ledger.samples()) {
    const auto & h = ledger.history(sample);
    if (h.size() < window + 1) {
      throw std::invalid_argument(
        "sample " + std::to_string(sample) + " has " + std::to_string(h.size()) +
        " recorded losses; " + std::to_string(window + 1) + " are needed");
    }
    std::size_t count = 0;
    for (std::size_t i = h.size() - window; i < h.size(); ++i) {
      const LossDelta d = loss_deltas(h[i - 1].loss, h[i].loss);
      if (inverse ? d.descent < d.ascent : d.descent > d.ascent) ++count;
    }
    if (static_cast<double>(count) < limit) flagged.push_back(sample);
  }
  return flagged;
}

}  // namespace

std::vector<std::size_t> difficulty_flags(const DifficultyLedger & ledger, double threshold, std::size_t window)
{
  return flags_by_count(ledger, threshold, window, false);
}

std::vector<std::size_t> inverse_flags(const DifficultyLedger & ledger, double threshold, std::size_t window)
{
  return flags_by_count(ledger, threshold, window, true);
}

std::vector<std::size_t> random_flags(const std::vector<std::size_t> & ids, std::size_t count, Rng & rng)
{
  if (count > ids.size()) {
    throw std::invalid_argument(
      "random_flags: cannot draw " + std::to_string(count) + " of " + std::to_string(ids.size()));
  }
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  std::sample(ids.begin(), ids.end(), std::back_inserter(chosen), count, rng);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::optional<Scene> make_pseudo_trajectory(
  const Scene & scene, const model::Model & model, double mask_percent, Rng & rng)
{
  return make_pseudo_trajectory(scene, model, model, mask_percent, rng);
}

std::optional<Scene> make_pseudo_trajectory(
  const Scene & scene, const model::Model & reconstructor, const model::Model & forecaster,
  double mask_percent, Rng & rng)
{
  using model::Tensor;
  const auto [normalized, transform] = data::normalize_scene(scene, 0.0);
  const std::size_t n = scene.agents();
  const data::MaskedPast masked = data::mask_past(normalized, mask_percent, rng);

  model::Graph g;
  g.set_grad_enabled(false);
  model::ForwardContext ctx{g, model::Mode::inference, nullptr};
  const Tensor masked_tokens = model::past_tokens(masked);
  const auto masked_features = reconstructor.encode(ctx, masked_tokens, n);
  const auto posterior = reconstructor.posterior_params_recon(ctx, masked_features, n);
  if (!posterior.mu.value().all_finite()) return std::nullopt;
  const Tensor recon = reconstructor.decode_reconstruction(ctx, masked_features, masked_tokens, posterior.mu, n).value();
  if (!recon.all_finite()) return std::nullopt;

  // Encoder tokens for the reconstructed past; nothing is masked any more.
  Tensor tokens(recon.rows(), 3);
  Tensor last(n, 2);
  for (std::size_t r = 0; r < recon.rows(); ++r) {
    tokens(r, 0) = recon(r, 0);
    tokens(r, 1) = recon(r, 1);
  }
  for (std::size_t a = 0; a < n; ++a) {
    last(a, 0) = recon((Scene::kPastSteps - 1) * n + a, 0);
    last(a, 1) = recon((Scene::kPastSteps - 1) * n + a, 1);
  }
  const auto features = forecaster.encode(ctx, tokens, n);
  const auto prior = forecaster.prior_params(ctx, features, n);
  const Tensor future = forecaster.decode_future_autoregressive(ctx, features, prior.mu, last, n).value();
  if (!future.all_finite()) return std::nullopt;

  Scene out = scene;
  out.source = data::SourceTag::pseudo;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t t = 0; t < Scene::kPastSteps; ++t) {
      out.at(a, t) = transform.invert({recon(t * n + a, 0), recon(t * n + a, 1)});
    }
    for (std::size_t t = 0; t < Scene::kFutureSteps; ++t) {
      out.at(a, Scene::kPastSteps + t) = transform.invert({future(t * n + a, 0), future(t * n + a, 1)});
    }
  }
  return out;
}

Scene linear_extrapolate(const Scene & scene, LinearMode mode)
{
  Scene out = scene;
  out.source = data::SourceTag::baseline_aug;
  const std::size_t first = mode == LinearMode::first_two ? 0 : Scene::kPastSteps - 2;
  for (std::size_t a = 0; a < scene.agents(); ++a) {
    const data::Vec2 velocity = scene.at(a, first + 1) - scene.at(a, first);
    const data::Vec2 origin = scene.at(a, Scene::kPastSteps - 1);
    for (std::size_t k = 1; k <= Scene::kFutureSteps; ++k) {
      out.at(a, Scene::kPastSteps - 1 + k) = origin + static_cast<double>(k) * velocity;
    }
  }
  return out;
}

Scene social_force_extrapolate(const Scene & scene, const data::SynthConfig & config)
{
  std::vector<data::SimAgent> agents(scene.agents());
  for (std::size_t a = 0; a < scene.agents(); ++a) {
    const data::Vec2 p = scene.at(a, Scene::kPastSteps - 1);
    const data::Vec2 v = (1.0 / config.time_step) * (p - scene.at(a, Scene::kPastSteps - 2));
    const double speed = data::norm(v);
    agents[a].position = p;
    agents[a].velocity = v;
    agents[a].preferred_speed = speed;
    agents[a].goal = speed > 0.0 ? p + (100.0 / speed) * v : p;
  }
  const Scene rollout = data::simulate_scene(agents, config);
  Scene out = scene;
  out.source = data::SourceTag::baseline_aug;
  for (std::size_t a = 0; a < scene.agents(); ++a) {
    for (std::size_t k = 1; k <= Scene::kFutureSteps; ++k) {
      out.at(a, Scene::kPastSteps - 1 + k) = rollout.at(a, k);
    }
  }
  return out;
}

AugmentationPool refresh_pool(
  const std::vector<Scene> & trainset, const std::vector<std::size_t> & flagged,
  const SceneGenerator & generate, DifficultyLedger & ledger, int epoch)
{
  AugmentationPool pool;
  pool.generation_epoch = epoch;
  for (std::size_t id : flagged) {
    if (id >= trainset.size()) {
      throw std::out_of_range("refresh_pool: sample " + std::to_string(id) + " is not in the training set");
    }
    const Scene & scene = trainset[id];
    if (scene.source != data::SourceTag::real) continue;
    std::optional<Scene> made = generate(scene, id);
    if (!made) {
      ++pool.rejected;
      continue;
    }
    pool.scenes.push_back(std::move(*made));
    pool.source_ids.push_back(id);
  }
  ledger.clear();
  return pool;
}

void write_pool(std::ostream & out, const AugmentationPool & pool)
{
  out << data::kDatasetHeader << '\n';
  out << "# pool generation_epoch=" << pool.generation_epoch << " rejected=" << pool.rejected << " flagged=";
  for (std::size_t i = 0; i < pool.source_ids.size(); ++i) {
    out << (i == 0 ? "" : ",") << pool.source_ids[i];
  }
  out << '\n';
  std::ostringstream body;
  data::write_dataset(body, pool.scenes);
  // write_dataset starts with its own header line; keep a single header.
  const std::string text = body.str();
  out << text.substr(text.find('\n') + 1);
}

}  // namespace socrec::curriculum
