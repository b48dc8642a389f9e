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

TEST(GaussianKl, UnitShiftIsOneHalf)
{
  const Params q{DTensor(1, 1, 1.0), DTensor(1, 1, 1.0)};
  EXPECT_NEAR(nn::gaussian_kl(q, nn::standard_normal<D>(1, 1)), 0.5, 1e-12);
}

TEST(GaussianKl, IdenticalDistributionsGiveZero)
{
  Rng rng(1);
  const Params q{random_tensor(3, 4, rng), random_tensor(3, 4, rng, 0.05, 1.0)};
  EXPECT_NEAR(nn::gaussian_kl(q, q), 0.0, 1e-12);
}

TEST(GaussianKl, MatchesClosedFormAndIsNonNegative)
{
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = dim(rng), d = dim(rng);
    const Params q{random_tensor(n, d, rng, -3, 3), random_tensor(n, d, rng, 0.05, 3)};
    const Params p{random_tensor(n, d, rng, -3, 3), random_tensor(n, d, rng, 0.05, 3)};
    const double kl = nn::gaussian_kl(q, p);
    EXPECT_GE(kl, 0.0);
    using oracle::to_matrix;
    EXPECT_NEAR(kl, oracle::kl(to_matrix(q.mu), to_matrix(q.sigma), to_matrix(p.mu), to_matrix(p.sigma)), 1e-9 * (1 + kl));
  }
}

TEST(GaussianKl, GraphAndValueVersionsAgree)
{
  Rng rng(3);
  const Params q{random_tensor(2, 3, rng), random_tensor(2, 3, rng, 0.05, 1.0)};
  const Params p{random_tensor(2, 3, rng), random_tensor(2, 3, rng, 0.05, 1.0)};
  DGraph g;
  const nn::GaussianVars<D> qv{g.constant(q.mu), g.constant(q.sigma)};
  const nn::GaussianVars<D> pv{g.constant(p.mu), g.constant(p.sigma)};
  EXPECT_NEAR(nn::gaussian_kl(qv, pv).value()(0, 0), nn::gaussian_kl(q, p), 1e-12);
}

TEST(GaussianKl, RejectsBadOperands)
{
  const Params good{DTensor(2, 2, 0.0), DTensor(2, 2, 1.0)};
  const Params wide{DTensor(2, 3, 0.0), DTensor(2, 3, 1.0)};
  const Params degenerate{DTensor(2, 2, 0.0), DTensor(2, 2, 0.0)};
  EXPECT_THROW(nn::gaussian_kl(good, wide), ShapeError);
  EXPECT_THROW(nn::gaussian_kl(degenerate, good), std::domain_error);
  EXPECT_THROW(nn::gaussian_kl(Params{DTensor(0, 2), DTensor(0, 2)}, Params{DTensor(0, 2), DTensor(0, 2)}), ShapeError);
}

TEST(GaussianFromLogVar, SigmaIsHalfExpOfClampedLogVar)
{
  DGraph g;
  const auto gv = nn::gaussian_from_log_var(g.constant(DTensor(1, 3, 0.0)), g.constant(DTensor(1, 3, {0.0, 2.0, 50.0})));
  EXPECT_NEAR(gv.sigma.value()(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(gv.sigma.value()(0, 1), std::exp(1.0), 1e-12);
  EXPECT_NEAR(gv.sigma.value()(0, 2), std::exp(nn::kLogVarMax / 2), 1e-9);
}

TEST(Reparameterize, ShiftsAndScalesNoise)
{
  const Params p{DTensor(1, 2, {1.0, -1.0}), DTensor(1, 2, {2.0, 0.5})};
  const DTensor z = nn::reparameterize(p, DTensor(1, 2, {0.5, 2.0}));
  EXPECT_DOUBLE_EQ(z(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(z(0, 1), 0.0);
  EXPECT_THROW(nn::reparameterize(p, DTensor(2, 2)), ShapeError);
}

TEST(Reparameterize, SampleMomentsMatchParameters)
{
  Rng rng(4);
  std::normal_distribution<double> normal;
  const Params p{DTensor(1, 1, 0.7), DTensor(1, 1, 1.5)};
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = nn::reparameterize(p, DTensor(1, 1, normal(rng)))(0, 0);
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.7, 0.05);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 1.5, 0.05);
}

}  // namespace
}  // namespace socrec::testing
