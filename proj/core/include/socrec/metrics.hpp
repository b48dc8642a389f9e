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

#ifndef SOCREC__METRICS_HPP_
#define SOCREC__METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socrec/data.hpp"
#include "socrec/model.hpp"
#include "socrec/prediction.hpp"
#include "socrec/random.hpp"

namespace socrec::metrics
{

enum class Reduction { min, mean };

/// Kernel variance floor and log-density floor used by kde_nll.
inline constexpr double kKdeVarianceFloor = 1e-6;
inline constexpr double kKdeDensityFloor = 1e-9;

/// Per agent: mean L2 error over the 12 steps, reduced over the K samples.
std::vector<double> ade_per_agent(const PredictionSet & preds, const PredictionSet & gt, Reduction mode);
/// Per agent: L2 error at the last step, reduced over the K samples.
std::vector<double> fde_per_agent(const PredictionSet & preds, const PredictionSet & gt, Reduction mode);
double ade(const PredictionSet & preds, const PredictionSet & gt, Reduction mode);
double fde(const PredictionSet & preds, const PredictionSet & gt, Reduction mode);

/// log of a 2D diagonal Gaussian KDE at `x` (Scott bandwidth), floored at ln(1e-9).
double kde_log_density(const std::vector<data::Vec2> & samples, data::Vec2 x);
/// Per agent: negative KDE log likelihood of the truth averaged over the 12 steps.
std::vector<double> kde_nll_per_agent(const PredictionSet & preds, const PredictionSet & gt);
double kde_nll(const PredictionSet & preds, const PredictionSet & gt);

struct OverlapStats
{
  std::size_t count = 0;   // (sample, pair, step) events closer than epsilon
  std::size_t events = 0;  // all (sample, pair, step) combinations

  double percent() const { return events == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(events); }
  OverlapStats & operator+=(const OverlapStats & o)
  {
    count += o.count;
    events += o.events;
    return *this;
  }
};

/// Pairs i < j of the same sample at the same step with distance < epsilon_m.
OverlapStats overlap_stats(const PredictionSet & preds, double epsilon_m);

/// Returns K futures for a scene in the scene's frame.
using Predictor = std::function<PredictionSet(const data::Scene & scene, std::size_t k, Rng & rng)>;

Predictor model_predictor(const model::Model & model);
/// Repeats the last observed velocity; every sample is identical.
Predictor constant_velocity_predictor();
/// Returns the ground truth K times.
Predictor oracle_predictor();

struct MetricSummary
{
  double ade_min = 0.0;
  double ade_mean = 0.0;
  double fde_min = 0.0;
  double fde_mean = 0.0;
  std::optional<double> kde_nll;  // absent when fewer than two samples
  std::size_t overlap_count = 0;
  double overlap_pct = 0.0;
  std::size_t scenes = 0;
  std::size_t pedestrians = 0;
};

/// Metrics for one evaluation dataset: all K samples and the mode sample alone.
struct DatasetMetrics
{
  std::string dataset;
  std::size_t k = 0;
  double epsilon_m = 0.0;
  std::uint64_t seed = 0;
  MetricSummary sampled;
  MetricSummary mode_only;
};

struct MetricReport
{
  std::vector<DatasetMetrics> datasets;
};

/**
 * @brief Samples K predictions per scene and aggregates every metric.
 *
 * Scene s draws from the stream (seed, evaluation, s). Errors are averaged
 * over pedestrians of all scenes. Sample 0 is treated as the mode sample.
 */
DatasetMetrics evaluate(
  const Predictor & predictor, const std::vector<data::Scene> & scenes, std::string_view dataset,
  std::size_t k, double epsilon_m, std::uint64_t seed);

/// Receives every scene's predictions in scene order.
using PredictionObserver = std::function<void(std::size_t scene, const PredictionSet & preds)>;

/// As above, sampling scenes on up to `threads` threads; results do not depend on the thread count.
DatasetMetrics evaluate(
  const Predictor & predictor, const std::vector<data::Scene> & scenes, std::string_view dataset,
  std::size_t k, double epsilon_m, std::uint64_t seed, std::size_t threads,
  const PredictionObserver & observer = {});

inline constexpr std::string_view kMetricCsvHeader =
  "dataset,ade_min,fde_min,ade_mean,fde_mean,kde_nll,overlap_count,overlap_pct";
/// One CSV row of the sampled metrics; kde_nll is empty when absent.
std::string metric_csv_row(const DatasetMetrics & metrics);

std::string report_to_json(const MetricReport & report);
/// Throws ParseError on malformed input.
MetricReport report_from_json(std::string_view text);

}  // namespace socrec::metrics

#endif  // SOCREC__METRICS_HPP_
