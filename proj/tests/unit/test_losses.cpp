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

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "socrec/errors.hpp"

namespace socrec::testing
{
namespace
{

using Params = nn::GaussianParams<D>;
using Traj = std::vector<std::vector<data::Vec2>>;

/// Time-major (T*N) x 2 tensor from traj[agent][t].
DTensor to_rows(const Traj & traj)
{
  const std::size_t n = traj.size(), steps = traj.empty() ? 0 : traj[0].size();
  DTensor out(n * steps, 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t t = 0; t < steps; ++t) {
      out(t * n + a, 0) = traj[a][t].x;
      out(t * n + a, 1) = traj[a][t].y;
    }
  }
  return out;
}

Traj random_traj(std::size_t n, std::size_t steps, double spread, Rng & rng)
{
  std::uniform_real_distribution<double> u(-spread, spread);
  Traj traj(n, std::vector<data::Vec2>(steps));
  for (auto & row : traj) {
    for (auto & p : row) p = {u(rng), u(rng)};
  }
  return traj;
}

double social(const Traj & traj, double eps, bool squared = true)
{
  return losses::social_loss<D>(to_rows(traj), traj.size(), eps, squared);
}

Params unit_prior(std::size_t n, std::size_t d) { return nn::standard_normal<D>(n, d); }

TEST(ForecastLoss, HandValues)
{
  Rng rng(1);
  const DTensor gt = random_tensor(24, 2, rng);
  const Params p = unit_prior(2, 1);
  EXPECT_NEAR(losses::forecast_loss<D>(gt, gt, p, p), 0.0, 1e-12);
  DTensor off = gt;
  for (auto & v : off.values()) v += 1.0;
  EXPECT_NEAR(losses::forecast_loss<D>(off, gt, p, p), 1.0, 1e-12);
  const Params q{DTensor(1, 1, 1.0), DTensor(1, 1, 1.0)};
  EXPECT_NEAR(losses::forecast_loss<D>(gt, gt, q, unit_prior(1, 1)), 0.5, 1e-12);
}

TEST(ForecastLoss, ShapeMismatchThrows)
{
  const Params p = unit_prior(2, 1);
  EXPECT_THROW(losses::forecast_loss<D>(DTensor(24, 2), DTensor(22, 2), p, p), ShapeError);
}

TEST(ReconLoss, HandValues)
{
  Rng rng(2);
  const DTensor past = random_tensor(16, 2, rng);
  EXPECT_NEAR(losses::recon_loss<D>(past, past, unit_prior(2, 4)), 0.0, 1e-12);
  const Params q{DTensor(1, 1, 1.0), DTensor(1, 1, 1.0)};
  EXPECT_NEAR(losses::recon_loss<D>(past, past, q), 0.5, 1e-12);
  DTensor shifted = past;
  for (std::size_t r = 0; r < shifted.rows(); ++r) shifted(r, 0) += 0.1;
  EXPECT_NEAR(losses::recon_loss<D>(shifted, past, unit_prior(2, 4)), 0.005, 1e-12);
  EXPECT_THROW(losses::recon_loss<D>(DTensor(16, 2), DTensor(16, 3), q), ShapeError);
}

TEST(ElboLosses, NonNegativeAndZeroOnlyAtExactFit)
{
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = dim(rng);
    const DTensor gt = random_tensor(12 * n, 2, rng), pred = random_tensor(12 * n, 2, rng);
    const Params q{random_tensor(n, 3, rng), random_tensor(n, 3, rng, 0.2, 2.0)};
    const Params p{random_tensor(n, 3, rng), random_tensor(n, 3, rng, 0.2, 2.0)};
    EXPECT_GT(losses::forecast_loss<D>(pred, gt, q, p), 0.0);
    EXPECT_GT(losses::recon_loss<D>(pred, gt, q), 0.0);
    EXPECT_NEAR(losses::forecast_loss<D>(gt, gt, q, q), 0.0, 1e-12);
  }
}

TEST(SocialLoss, HandValues)
{
  Traj far(2, std::vector<data::Vec2>(12));
  for (std::size_t t = 0; t < 12; ++t) far[1][t] = {1.0, 0.0};
  EXPECT_EQ(social(far, 0.1), 0.0);

  Traj touch = far;
  touch[1][5] = {0.0, 0.0};
  EXPECT_NEAR(social(touch, 0.1), 0.1, 1e-12);

  Traj close(2, std::vector<data::Vec2>(12));
  for (std::size_t t = 0; t < 12; ++t) close[1][t] = {0.2, 0.0};
  EXPECT_NEAR(social(close, 0.1), 0.72, 1e-12);
  // plain distance: 0.2 >= 0.1 so the hinge is off
  EXPECT_EQ(social(close, 0.1, false), 0.0);
  EXPECT_NEAR(social(close, 0.5, false), 12 * 0.3, 1e-12);
}

TEST(SocialLoss, FewerThanTwoAgentsIsZero)
{
  Rng rng(4);
  EXPECT_EQ(social(random_traj(1, 12, 0.01, rng), 1.0), 0.0);
  EXPECT_EQ(losses::social_loss<D>(DTensor(0, 2), 0, 1.0), 0.0);
}

TEST(SocialLoss, RejectsBadArguments)
{
  EXPECT_THROW(losses::social_loss<D>(DTensor(7, 2), 2, 0.1), ShapeError);
  EXPECT_THROW(losses::social_loss<D>(DTensor(8, 3), 2, 0.1), ShapeError);
  EXPECT_THROW(losses::social_loss<D>(DTensor(8, 2), 2, -0.1), std::invalid_argument);
}

TEST(SocialLoss, MatchesPairLoopOracle)
{
  Rng rng(5);
  std::uniform_real_distribution<double> eps(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 6, steps = 1 + static_cast<std::size_t>(trial % 12);
    const Traj traj = random_traj(n, steps, 0.6, rng);
    const double e = eps(rng);
    const bool squared = trial % 2 == 0;
    EXPECT_NEAR(social(traj, e, squared), oracle::social_loss(traj, e, squared), 1e-12);
  }
}

TEST(SocialLoss, MonotoneInPairSeparation)
{
  Rng rng(6);
  std::uniform_real_distribution<double> stretch(1.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 4;
    Traj traj = random_traj(n, 12, 0.4, rng);
    const double before = social(traj, 0.3, trial % 2 == 0);
    // move agent 1 away from agent 0 along their separation at one timestep;
    // with only two agents no other pair is touched
    Traj moved = traj;
    std::uniform_int_distribution<std::size_t> pick_t(0, 11);
    const std::size_t t = pick_t(rng);
    const data::Vec2 sep = traj[1][t] - traj[0][t];
    moved[1][t] = traj[0][t] + stretch(rng) * sep;
    if (n == 2) {
      EXPECT_LE(social(moved, 0.3, trial % 2 == 0), before + 1e-15);
    }
    // scaling the whole configuration up spreads every pair
    Traj spread = traj;
    const double s = stretch(rng);
    for (auto & row : spread) {
      for (auto & p : row) p = s * p;
    }
    EXPECT_LE(social(spread, 0.3, trial % 2 == 0), before + 1e-15);
  }
}

TEST(SocialLoss, NearCoincidentGradientPushesApart)
{
  Traj traj(2, std::vector<data::Vec2>(12));
  for (std::size_t t = 0; t < 12; ++t) {
    traj[0][t] = {0.0, 0.0};
    traj[1][t] = {1.0, 1.0};
  }
  traj[1][4] = {1e-3, 0.0};
  const DTensor rows = to_rows(traj);
  DGraph g;
  const DVar x = g.input(rows);
  g.backward(losses::social_loss<D>(x, 2, 0.1));
  const DTensor & grad = g.grad(x);
  const std::size_t r = 4 * 2 + 1;
  // analytic: d/dx (0.1 - x^2) = -2x
  EXPECT_NEAR(grad(r, 0), -2e-3, 1e-12);
  EXPECT_LT(grad(r, 0), 0.0);  // descent moves agent 1 further along +x
  EXPECT_EQ(grad(r, 1), 0.0);
  const double h = 1e-6;
  DTensor up = rows, down = rows;
  up(r, 0) += h;
  down(r, 0) -= h;
  const double fd = (losses::social_loss<D>(up, 2, 0.1) - losses::social_loss<D>(down, 2, 0.1)) / (2 * h);
  EXPECT_LT(std::abs(fd - grad(r, 0)) / std::abs(grad(r, 0)), 1e-4);
}

TEST(SocialLoss, GradientAtExactCoincidenceIsZero)
{
  const DTensor rows(2, 2, 0.0);
  DGraph g;
  const DVar x = g.input(rows);
  g.backward(losses::social_loss<D>(x, 2, 0.1));
  for (double v : g.grad(x).values()) EXPECT_EQ(v, 0.0);
}

TEST(TotalLoss, Decomposition)
{
  EXPECT_EQ(losses::total_loss({}, {}).total, 0.0);
  losses::LossBreakdown parts;
  parts.l_f = 2.0;
  parts.l_r = 1.0;
  parts.l_soc_f = 0.1;
  parts.l_soc_r = 0.2;
  EXPECT_NEAR(losses::total_loss(parts, {}).total, 3.3, 1e-12);
  EXPECT_NEAR(losses::total_loss(parts, {1.0, 1.0, 0.0}).total, 3.0, 1e-12);
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    parts = {u(rng), u(rng), u(rng), u(rng), 0.0};
    const losses::LossWeights w{u(rng), u(rng), u(rng)};
    const auto out = losses::total_loss(parts, w);
    EXPECT_NEAR(out.total, w.w_forecast * parts.l_f + w.w_recon * parts.l_r + w.w_social * (parts.l_soc_f + parts.l_soc_r), 1e-9);
    EXPECT_EQ(out.l_f, parts.l_f);
  }
}

TEST(LossLog, RowFormat)
{
  losses::LossBreakdown parts{0.5, 0.25, 0.0, 0.125, 0.875};
  EXPECT_EQ(losses::loss_log_row(3, parts), "3,0.5,0.25,0,0.125,0.875");
  EXPECT_EQ(losses::kLossLogHeader, "epoch,l_f,l_r,l_soc_f,l_soc_r,total");
}

TEST(GraphLosses, AgreeWithValueOverloads)
{
  Rng rng(8);
  const DTensor pred = random_tensor(24, 2, rng), gt = random_tensor(24, 2, rng);
  const Params q{random_tensor(2, 3, rng), random_tensor(2, 3, rng, 0.05, 1.0)};
  const Params p{random_tensor(2, 3, rng), random_tensor(2, 3, rng, 0.05, 1.0)};
  DGraph g;
  const nn::GaussianVars<D> qv{g.constant(q.mu), g.constant(q.sigma)}, pv{g.constant(p.mu), g.constant(p.sigma)};
  EXPECT_NEAR(losses::forecast_loss<D>(g.constant(pred), gt, qv, pv).value()(0, 0), losses::forecast_loss<D>(pred, gt, q, p), 1e-12);
  EXPECT_NEAR(losses::recon_loss<D>(g.constant(pred), gt, qv).value()(0, 0), losses::recon_loss<D>(pred, gt, q), 1e-12);
  using oracle::to_matrix;
  EXPECT_NEAR(
    losses::forecast_loss<D>(pred, gt, q, p),
    oracle::mse(to_matrix(pred), to_matrix(gt)) + oracle::kl(to_matrix(q.mu), to_matrix(q.sigma), to_matrix(p.mu), to_matrix(p.sigma)),
    1e-12);
}

}  // namespace
}  // namespace socrec::testing
