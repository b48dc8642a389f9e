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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "socrec/curriculum.hpp"
#include "socrec/training.hpp"

namespace socrec::curriculum
{
namespace
{

DifficultyLedger ledger_from(const std::vector<std::vector<double>> & traces)
{
  DifficultyLedger ledger;
  for (std::size_t s = 0; s < traces.size(); ++s) {
    for (std::size_t e = 0; e < traces[s].size(); ++e) ledger.record(s, static_cast<int>(e + 1), traces[s][e]);
  }
  return ledger;
}

std::vector<double> ramp(double start, double step, std::size_t n)
{
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + step * static_cast<double>(i);
  return out;
}

std::vector<double> alternating(std::size_t deltas)
{
  std::vector<double> out{2.0};
  for (std::size_t i = 0; i < deltas; ++i) out.push_back(i % 2 == 0 ? 1.0 : 2.0);
  return out;
}

std::vector<Scene> toy_scenes(std::size_t n, std::uint64_t seed, std::size_t agents_max = 3)
{
  data::SynthConfig cfg;
  cfg.n_scenes = n;
  cfg.agents_min = 1;
  cfg.agents_max = agents_max;
  cfg.heading_noise = 0.3;
  return data::generate_synthetic_dataset(cfg, seed);
}

model::HyperParams tiny()
{
  model::HyperParams h;
  h.d_model = 16;
  h.d_ff = 32;
  h.d_latent = 4;
  h.heads = 2;
  h.dropout = 0.0;
  return h;
}

TEST(LossDeltas, HandValues)
{
  const LossDelta same = loss_deltas(1.5, 1.5);
  EXPECT_EQ(same.descent, 0.0);
  EXPECT_EQ(same.ascent, 0.0);
  const LossDelta down = loss_deltas(2.0, 1.0);
  EXPECT_NEAR(down.descent, std::log(2.0), 1e-12);
  EXPECT_EQ(down.ascent, 0.0);
  const LossDelta up = loss_deltas(1.0, 2.0);
  EXPECT_NEAR(up.ascent, std::log(2.0), 1e-12);
  EXPECT_EQ(up.descent, 0.0);
}

TEST(LossDeltas, ExclusiveNonNegativeAndFloored)
{
  Rng rng(1);
  std::uniform_real_distribution<double> u(-2.0, 6.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = i % 10 == 0 ? 0.0 : std::pow(10.0, u(rng) - 4.0);
    const double b = i % 7 == 0 ? 0.0 : std::pow(10.0, u(rng) - 4.0);
    const LossDelta d = loss_deltas(a, b);
    EXPECT_GE(d.descent, 0.0);
    EXPECT_GE(d.ascent, 0.0);
    EXPECT_EQ(d.descent * d.ascent, 0.0);
    EXPECT_TRUE(std::isfinite(d.descent) && std::isfinite(d.ascent));
    const auto o = oracle::loss_deltas(a, b);
    EXPECT_NEAR(d.descent, o.d, 1e-12 * (1 + o.d));
    EXPECT_NEAR(d.ascent, o.a, 1e-12 * (1 + o.a));
  }
  EXPECT_EQ(loss_deltas(0.0, 0.0).descent, 0.0);
}

TEST(DifficultyFlags, Examples)
{
  const DifficultyLedger ledger = ledger_from({ramp(20.0, -1.0, 11), ramp(1.0, 1.0, 11), alternating(10)});
  EXPECT_EQ(ledger.count(0), 10u);
  EXPECT_EQ(ledger.count(1), 0u);
  EXPECT_EQ(ledger.count(2), 5u);
  EXPECT_EQ(difficulty_flags(ledger, 0.5, 10), std::vector<std::size_t>{1});
  EXPECT_EQ(inverse_flags(ledger, 0.5, 10), std::vector<std::size_t>{0});
  EXPECT_EQ(ledger.inverse_count(2), 5u);
}

TEST(DifficultyFlags, InsufficientHistoryNamesTheSample)
{
  const DifficultyLedger ledger = ledger_from({ramp(1.0, 1.0, 11), ramp(1.0, 1.0, 10)});
  try {
    difficulty_flags(ledger, 0.5, 10);
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument & e) {
    EXPECT_NE(std::string(e.what()).find("sample 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(inverse_flags(ledger, 0.5, 10), std::invalid_argument);
  EXPECT_THROW(difficulty_flags(ledger, 0.5, 0), std::invalid_argument);
}

TEST(DifficultyFlags, UsesOnlyTheTrailingWindow)
{
  // 10 early descents followed by 5 ascents.
  std::vector<double> trace = ramp(20.0, -1.0, 11);
  for (int i = 1; i <= 5; ++i) trace.push_back(10.0 + i);
  const DifficultyLedger ledger = ledger_from({trace});
  EXPECT_EQ(ledger.count(0), 10u);
  EXPECT_EQ(difficulty_flags(ledger, 0.5, 5), std::vector<std::size_t>{0});
  EXPECT_TRUE(difficulty_flags(ledger, 0.5, 15).empty());
}

TEST(DifficultyLedger, CountsMatchBruteForceOnRandomTraces)
{
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_int_distribution<int> len(2, 30), tie(0, 5);
  std::vector<std::vector<double>> traces(1000);
  for (auto & t : traces) {
    t.resize(static_cast<std::size_t>(len(rng)));
    for (std::size_t e = 0; e < t.size(); ++e) t[e] = (e > 0 && tie(rng) == 0) ? t[e - 1] : u(rng);
  }
  const DifficultyLedger ledger = ledger_from(traces);
  for (std::size_t s = 0; s < traces.size(); ++s) {
    const std::size_t deltas = traces[s].size() - 1;
    ASSERT_EQ(ledger.deltas(s), deltas);
    EXPECT_EQ(ledger.count(s), oracle::descending_count(traces[s], deltas));
    EXPECT_LE(ledger.count(s), deltas);
    std::size_t up = 0;
    for (std::size_t e = 1; e < traces[s].size(); ++e) {
      const auto d = oracle::loss_deltas(traces[s][e - 1], traces[s][e]);
      up += d.d < d.a;
    }
    EXPECT_EQ(ledger.inverse_count(s), up);
  }
  EXPECT_EQ(DifficultyLedger::from_entries(ledger.entries()), ledger);
  const DifficultyLedger rebuilt = DifficultyLedger::from_entries(ledger.entries());
  for (std::size_t s = 0; s < traces.size(); ++s) EXPECT_EQ(rebuilt.count(s), ledger.count(s));
}

TEST(DifficultyFlags, DisjointAndCoverAllButTies)
{
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_int_distribution<int> tie(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t window = 1 + static_cast<std::size_t>(trial % 10);
    std::vector<std::vector<double>> traces(20, std::vector<double>(window + 1));
    for (auto & t : traces) {
      for (std::size_t e = 0; e < t.size(); ++e) t[e] = (e > 0 && tie(rng) == 0) ? t[e - 1] : u(rng);
    }
    const DifficultyLedger ledger = ledger_from(traces);
    // With D = 0.5 a sample whose deltas are all strict lands on exactly one
    // side, unless descents and ascents split evenly.
    const double d = 0.5;
    const auto hard = difficulty_flags(ledger, d, window);
    const auto easy = inverse_flags(ledger, d, window);
    std::set<std::size_t> hs(hard.begin(), hard.end()), es(easy.begin(), easy.end());
    for (std::size_t s = 0; s < traces.size(); ++s) {
      const std::size_t down = ledger.count(s), up = ledger.inverse_count(s);
      const bool tied = down + up < window || down == up;
      EXPECT_FALSE(hs.count(s) && es.count(s) && !tied) << "sample " << s;
      if (!tied) EXPECT_TRUE(hs.count(s) != es.count(s)) << "sample " << s;
    }
  }
}

TEST(RandomFlags, Examples)
{
  const std::vector<std::size_t> ids{3, 5, 8, 13, 21};
  Rng rng(4);
  EXPECT_TRUE(random_flags(ids, 0, rng).empty());
  EXPECT_EQ(random_flags(ids, 5, rng), ids);
  EXPECT_THROW(random_flags(ids, 6, rng), std::invalid_argument);
  Rng a(9), b(9);
  const auto x = random_flags(ids, 3, a), y = random_flags(ids, 3, b);
  EXPECT_EQ(x, y);
  EXPECT_EQ(x.size(), 3u);
  EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
  EXPECT_EQ(std::set<std::size_t>(x.begin(), x.end()).size(), 3u);
}

TEST(RandomFlags, RoughlyUniform)
{
  std::vector<std::size_t> ids(10);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(5);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 5000; ++i) {
    for (std::size_t id : random_flags(ids, 3, rng)) ++hits[id];
  }
  for (int h : hits) EXPECT_NEAR(h / 5000.0, 0.3, 0.03);
}

TEST(LinearExtrapolate, Examples)
{
  std::vector<data::Vec2> pos(20, data::Vec2{2.0, 3.0});
  const Scene still = data::make_scene({0}, pos);
  for (auto mode : {LinearMode::first_two, LinearMode::last_two}) {
    const Scene out = linear_extrapolate(still, mode);
    EXPECT_EQ(out.source, data::SourceTag::baseline_aug);
    for (std::size_t t = 8; t < 20; ++t) EXPECT_EQ(out.at(0, t), (data::Vec2{2.0, 3.0}));
  }
  for (std::size_t t = 0; t < 20; ++t) pos[t] = {static_cast<double>(t) * static_cast<double>(t) * 0.1, 0.0};
  pos[6] = {5.0, 1.0};
  pos[7] = {6.0, 1.0};
  const Scene moving = data::make_scene({0}, pos);
  const Scene last = linear_extrapolate(moving, LinearMode::last_two);
  for (std::size_t k = 1; k <= 12; ++k) EXPECT_EQ(last.at(0, 7 + k), (data::Vec2{6.0 + static_cast<double>(k), 1.0}));
  for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(last.at(0, t), moving.at(0, t));
  const Scene first = linear_extrapolate(moving, LinearMode::first_two);
  EXPECT_NE(first.at(0, 19), last.at(0, 19));
  EXPECT_NEAR(first.at(0, 19).x, 6.0 + 12 * 0.1, 1e-12);
}

TEST(LinearExtrapolate, ModesAgreeWhenVelocitiesMatch)
{
  std::vector<data::Vec2> pos(20);
  for (std::size_t t = 0; t < 20; ++t) pos[t] = {0.3 * static_cast<double>(t), -0.1 * static_cast<double>(t)};
  const Scene s = data::make_scene({0}, pos);
  const Scene a = linear_extrapolate(s, LinearMode::first_two), b = linear_extrapolate(s, LinearMode::last_two);
  for (std::size_t t = 0; t < 20; ++t) {
    EXPECT_NEAR(a.at(0, t).x, b.at(0, t).x, 1e-12);
    EXPECT_NEAR(a.at(0, t).y, b.at(0, t).y, 1e-12);
  }
}

TEST(SocialForceExtrapolate, KeepsPastAndContinuesMotion)
{
  const Scene s = toy_scenes(1, 6)[0];
  data::SynthConfig cfg;
  const Scene out = social_force_extrapolate(s, cfg);
  EXPECT_EQ(out.source, data::SourceTag::baseline_aug);
  for (std::size_t a = 0; a < s.agents(); ++a) {
    for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(out.at(a, t), s.at(a, t));
  }
  EXPECT_NO_THROW(out.validate());
  cfg.interaction_strength = 0.0;
  const Scene free = social_force_extrapolate(s, cfg);
  for (std::size_t a = 0; a < s.agents(); ++a) {
    const data::Vec2 v = s.at(a, 7) - s.at(a, 6);
    EXPECT_NEAR(free.at(a, 19).x, s.at(a, 7).x + 12 * v.x, 1e-9);
    EXPECT_NEAR(free.at(a, 19).y, s.at(a, 7).y + 12 * v.y, 1e-9);
  }
}

TEST(PseudoTrajectory, ShapeTagAndDeterminism)
{
  const model::Model m(tiny(), 1);
  for (const Scene & s : toy_scenes(5, 7)) {
    Rng a(3), b(3);
    const auto x = make_pseudo_trajectory(s, m, 30.0, a);
    const auto y = make_pseudo_trajectory(s, m, 30.0, b);
    ASSERT_TRUE(x && y);
    EXPECT_EQ(x->agents(), s.agents());
    EXPECT_EQ(x->positions.size(), s.positions.size());
    EXPECT_EQ(x->ped_ids, s.ped_ids);
    EXPECT_EQ(x->source, data::SourceTag::pseudo);
    EXPECT_EQ(x->positions, y->positions);
    for (const auto & p : x->positions) EXPECT_TRUE(std::isfinite(p.x) && std::isfinite(p.y));
  }
}

TEST(PseudoTrajectory, ConvergedReconstructorReproducesThePast)
{
  model::HyperParams h = tiny();
  h.d_model = 32;
  h.d_ff = 64;
  h.mask_ratio = 0.0;
  h.learning_rate = 3e-3;
  training::TrainConfig cfg;
  cfg.hyper = h;
  cfg.seed = 11;
  cfg.social_loss = false;
  cfg.random_rotation = false;
  const std::vector<Scene> scenes = toy_scenes(10, 8, 2);
  model::Model m(h, 5);
  training::AdamState adam;

  auto recon_mse = [&] {
    double total = 0.0;
    std::size_t cells = 0;
    for (const Scene & raw : scenes) {
      const Scene s = data::normalize_scene(raw, 0.0).first;
      model::Graph g;
      g.set_grad_enabled(false);
      model::ForwardContext ctx{g};
      const model::Tensor tokens = model::past_tokens(s);
      const auto f = m.encode(ctx, tokens, s.agents());
      const auto q = m.posterior_params_recon(ctx, f, s.agents());
      const model::Tensor r = m.decode_reconstruction(ctx, f, tokens, q.mu, s.agents()).value();
      const model::Tensor p = model::past_positions(s);
      for (std::size_t i = 0; i < r.size(); ++i, ++cells) total += (r[i] - p[i]) * (r[i] - p[i]);
    }
    return total / static_cast<double>(cells);
  };

  double mse = recon_mse();
  for (int epoch = 1; epoch <= 2000 && mse >= 1e-3; ++epoch) {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const auto step = training::scene_step(m, cfg, scenes[i], i, epoch, false);
      training::optimizer_step(m.parameters(), step.grads, adam, h.learning_rate);
    }
    if (epoch % 10 == 0) mse = recon_mse();
  }
  ASSERT_LT(mse, 1e-3);

  for (const Scene & s : scenes) {
    Rng rng(1);
    const auto pseudo = make_pseudo_trajectory(s, m, 0.0, rng);
    ASSERT_TRUE(pseudo);
    for (std::size_t a = 0; a < s.agents(); ++a) {
      for (std::size_t t = 0; t < 8; ++t) {
        EXPECT_NEAR(pseudo->at(a, t).x, s.at(a, t).x, 0.15);
        EXPECT_NEAR(pseudo->at(a, t).y, s.at(a, t).y, 0.15);
      }
    }
  }
}

TEST(RefreshPool, CardinalityAndLedgerClear)
{
  const std::vector<Scene> train = toy_scenes(6, 9);
  DifficultyLedger ledger = ledger_from({{3, 2, 1}, {1, 2, 3}});
  const SceneGenerator copy = [](const Scene & s, std::size_t) -> std::optional<Scene> {
    Scene out = s;
    out.source = data::SourceTag::pseudo;
    return out;
  };
  const AugmentationPool empty = refresh_pool(train, {}, copy, ledger, 10);
  EXPECT_TRUE(empty.scenes.empty());
  EXPECT_TRUE(ledger.empty() || ledger.deltas(0) == 0);

  ledger = ledger_from({{3, 2, 1}});
  const AugmentationPool three = refresh_pool(train, {0, 2, 5}, copy, ledger, 20);
  ASSERT_EQ(three.scenes.size(), 3u);
  EXPECT_EQ(three.source_ids, (std::vector<std::size_t>{0, 2, 5}));
  EXPECT_EQ(three.generation_epoch, 20);
  for (const auto & s : three.scenes) EXPECT_EQ(s.source, data::SourceTag::pseudo);
  EXPECT_GT(three.generation_epoch, empty.generation_epoch);
  // the last recorded loss survives as the baseline for the next window
  EXPECT_EQ(ledger.deltas(0), 0u);
  ASSERT_EQ(ledger.history(0).size(), 1u);
  EXPECT_EQ(ledger.history(0)[0].loss, 1.0);

  EXPECT_THROW(refresh_pool(train, {6}, copy, ledger, 30), std::out_of_range);
}

TEST(RefreshPool, SkipsNonRealSamplesAndCountsRejections)
{
  std::vector<Scene> train = toy_scenes(4, 10);
  train[1].source = data::SourceTag::pseudo;
  DifficultyLedger ledger;
  std::vector<std::size_t> seen;
  const SceneGenerator gen = [&](const Scene & s, std::size_t id) -> std::optional<Scene> {
    seen.push_back(id);
    if (id == 3) return std::nullopt;
    return s;
  };
  const AugmentationPool pool = refresh_pool(train, {0, 1, 2, 3}, gen, ledger, 5);
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(pool.scenes.size(), 2u);
  EXPECT_EQ(pool.rejected, 1u);
}

TEST(WritePool, LoadsBackAsDataset)
{
  const std::vector<Scene> train = toy_scenes(3, 11);
  DifficultyLedger ledger;
  const AugmentationPool pool = refresh_pool(
    train, {0, 2}, [](const Scene & s, std::size_t) { return std::optional<Scene>(linear_extrapolate(s, LinearMode::last_two)); },
    ledger, 7);
  std::ostringstream out;
  write_pool(out, pool);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind(std::string(data::kDatasetHeader), 0), 0u);
  EXPECT_NE(text.find("generation_epoch=7"), std::string::npos);
  EXPECT_NE(text.find("flagged=0,2"), std::string::npos);
  std::istringstream in(text);
  const auto back = data::build_scenes(data::parse_trajectory_file(in), 10);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].positions, pool.scenes[1].positions);
}

}  // namespace
}  // namespace socrec::curriculum
