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

#include "socrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <exception>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "socrec/errors.hpp"

namespace socrec::metrics
{

using data::Scene;
using data::Vec2;

namespace
{

constexpr std::size_t kSteps = Scene::kFutureSteps;

void require_aligned(const PredictionSet & preds, const PredictionSet & gt)
{
  if (preds.samples == 0) throw std::invalid_argument("metrics need at least one sample (K = 0)");
  if (gt.samples != 1 || gt.agents != preds.agents) {
    throw ShapeError(
      "predictions for " + std::to_string(preds.agents) + " agents do not match ground truth for " +
      std::to_string(gt.agents));
  }
}

double reduce(const std::vector<double> & per_sample, Reduction mode)
{
  if (mode == Reduction::min) return *std::min_element(per_sample.begin(), per_sample.end());
  double total = 0.0;
  for (double v : per_sample) total += v;
  return total / static_cast<double>(per_sample.size());
}

template <typename ErrorOf>
std::vector<double> per_agent(const PredictionSet & preds, const PredictionSet & gt, Reduction mode, ErrorOf error_of)
{
  require_aligned(preds, gt);
  std::vector<double> out(preds.agents);
  std::vector<double> per_sample(preds.samples);
  for (std::size_t a = 0; a < preds.agents; ++a) {
    for (std::size_t k = 0; k < preds.samples; ++k) per_sample[k] = error_of(k, a);
    out[a] = reduce(per_sample, mode);
  }
  return out;
}

double average(const std::vector<double> & v)
{
  if (v.empty()) return 0.0;
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> ade_per_agent(const PredictionSet & preds, const PredictionSet & gt, Reduction mode)
{
  return per_agent(preds, gt, mode, [&](std::size_t k, std::size_t a) {
    double total = 0.0;
    for (std::size_t t = 0; t < kSteps; ++t) total += data::norm(preds.at(k, a, t) - gt.at(0, a, t));
    return total / static_cast<double>(kSteps);
  });
}

std::vector<double> fde_per_agent(const PredictionSet & preds, const PredictionSet & gt, Reduction mode)
{
  return per_agent(preds, gt, mode, [&](std::size_t k, std::size_t a) {
    return data::norm(preds.at(k, a, kSteps - 1) - gt.at(0, a, kSteps - 1));
  });
}

double ade(const PredictionSet & preds, const PredictionSet & gt, Reduction mode)
{
  return average(ade_per_agent(preds, gt, mode));
}

double fde(const PredictionSet & preds, const PredictionSet & gt, Reduction mode)
{
  return average(fde_per_agent(preds, gt, mode));
}

double kde_log_density(const std::vector<Vec2> & samples, Vec2 x)
{
  const std::size_t k = samples.size();
  if (k < 2) throw std::invalid_argument("kde needs at least two samples");
  if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw std::invalid_argument("kde: non-finite query point");
  const double n = static_cast<double>(k);
  Vec2 mean;
  for (const auto & s : samples) mean = mean + s;
  mean = (1.0 / n) * mean;
  double var_x = 0.0, var_y = 0.0;
  for (const auto & s : samples) {
    var_x += (s.x - mean.x) * (s.x - mean.x);
    var_y += (s.y - mean.y) * (s.y - mean.y);
  }
  // Scott's rule in two dimensions: h = sigma * n^(-1/6).
  const double factor = std::pow(n, -1.0 / 3.0);
  const double kx = std::max(var_x / (n - 1.0) * factor, kKdeVarianceFloor);
  const double ky = std::max(var_y / (n - 1.0) * factor, kKdeVarianceFloor);
  const double log_norm = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(kx * ky);
  std::vector<double> terms(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = x.x - samples[i].x, dy = x.y - samples[i].y;
    terms[i] = log_norm - 0.5 * (dx * dx / kx + dy * dy / ky);
  }
  const double peak = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  const double log_density = peak + std::log(acc) - std::log(n);
  return std::max(log_density, std::log(kKdeDensityFloor));
}

std::vector<double> kde_nll_per_agent(const PredictionSet & preds, const PredictionSet & gt)
{
  require_aligned(preds, gt);
  if (preds.samples < 2) throw std::invalid_argument("kde_nll needs K >= 2");
  std::vector<double> out(preds.agents);
  std::vector<Vec2> cloud(preds.samples);
  for (std::size_t a = 0; a < preds.agents; ++a) {
    double total = 0.0;
    for (std::size_t t = 0; t < kSteps; ++t) {
      for (std::size_t k = 0; k < preds.samples; ++k) cloud[k] = preds.at(k, a, t);
      total -= kde_log_density(cloud, gt.at(0, a, t));
    }
    out[a] = total / static_cast<double>(kSteps);
  }
  return out;
}

double kde_nll(const PredictionSet & preds, const PredictionSet & gt)
{
  return average(kde_nll_per_agent(preds, gt));
}

OverlapStats overlap_stats(const PredictionSet & preds, double epsilon_m)
{
  if (!(epsilon_m >= 0.0)) throw std::invalid_argument("overlap epsilon must be >= 0");
  OverlapStats stats;
  const std::size_t n = preds.agents;
  if (n < 2) return stats;
  stats.events = preds.samples * (n * (n - 1) / 2) * kSteps;
  for (std::size_t k = 0; k < preds.samples; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t t = 0; t < kSteps; ++t) {
          if (data::norm(preds.at(k, i, t) - preds.at(k, j, t)) < epsilon_m) ++stats.count;
        }
      }
    }
  }
  return stats;
}

Predictor model_predictor(const model::Model & model)
{
  return [&model](const Scene & scene, std::size_t k, Rng & rng) {
    return model.sample_predictions(scene, k, rng);
  };
}

Predictor constant_velocity_predictor()
{
  return [](const Scene & scene, std::size_t k, Rng &) {
    PredictionSet out(k, scene.agents());
    for (std::size_t a = 0; a < scene.agents(); ++a) {
      const Vec2 last = scene.at(a, Scene::kPastSteps - 1);
      const Vec2 v = last - scene.at(a, Scene::kPastSteps - 2);
      for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = 0; t < kSteps; ++t) out.at(s, a, t) = last + static_cast<double>(t + 1) * v;
      }
    }
    return out;
  };
}

Predictor oracle_predictor()
{
  return [](const Scene & scene, std::size_t k, Rng &) {
    const PredictionSet gt = ground_truth_future(scene);
    PredictionSet out(k, scene.agents());
    for (std::size_t s = 0; s < k; ++s) {
      std::copy(gt.points.begin(), gt.points.end(), out.points.begin() + static_cast<std::ptrdiff_t>(s * gt.points.size()));
    }
    return out;
  };
}

namespace
{

struct Accumulator
{
  std::vector<double> ade_min, ade_mean, fde_min, fde_mean, kde;
  OverlapStats overlap;
  std::size_t scenes = 0;

  void add(const PredictionSet & preds, const PredictionSet & gt, double epsilon_m)
  {
    auto append = [](std::vector<double> & dst, const std::vector<double> & src) {
      dst.insert(dst.end(), src.begin(), src.end());
    };
    append(ade_min, ade_per_agent(preds, gt, Reduction::min));
    append(ade_mean, ade_per_agent(preds, gt, Reduction::mean));
    append(fde_min, fde_per_agent(preds, gt, Reduction::min));
    append(fde_mean, fde_per_agent(preds, gt, Reduction::mean));
    if (preds.samples >= 2) append(kde, kde_nll_per_agent(preds, gt));
    overlap += overlap_stats(preds, epsilon_m);
    ++scenes;
  }

  MetricSummary summary(bool with_kde) const
  {
    MetricSummary s;
    s.ade_min = average(ade_min);
    s.ade_mean = average(ade_mean);
    s.fde_min = average(fde_min);
    s.fde_mean = average(fde_mean);
    if (with_kde) s.kde_nll = average(kde);
    s.overlap_count = overlap.count;
    s.overlap_pct = overlap.percent();
    s.scenes = scenes;
    s.pedestrians = ade_min.size();
    return s;
  }
};

PredictionSet first_sample(const PredictionSet & preds)
{
  PredictionSet out(1, preds.agents);
  std::copy(preds.points.begin(), preds.points.begin() + static_cast<std::ptrdiff_t>(out.points.size()), out.points.begin());
  return out;
}

}  // namespace

DatasetMetrics evaluate(
  const Predictor & predictor, const std::vector<Scene> & scenes, std::string_view dataset,
  std::size_t k, double epsilon_m, std::uint64_t seed)
{
  return evaluate(predictor, scenes, dataset, k, epsilon_m, seed, 1);
}

DatasetMetrics evaluate(
  const Predictor & predictor, const std::vector<Scene> & scenes, std::string_view dataset,
  std::size_t k, double epsilon_m, std::uint64_t seed, std::size_t threads,
  const PredictionObserver & observer)
{
  if (scenes.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (k == 0) throw std::invalid_argument("evaluate: K must be >= 1");
  std::vector<PredictionSet> predictions(scenes.size());
  auto predict = [&](std::size_t s) {
    Rng rng = make_rng(seed, {tag(Stream::evaluation), s});
    predictions[s] = predictor(scenes[s], k, rng);
  };
  threads = std::clamp<std::size_t>(threads, 1, scenes.size());
  if (threads == 1) {
    for (std::size_t s = 0; s < scenes.size(); ++s) predict(s);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t s = w; s < scenes.size(); s += threads) predict(s);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto & t : workers) t.join();
    for (const auto & e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  Accumulator sampled, mode;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const PredictionSet & preds = predictions[s];
    if (preds.samples != k || preds.agents != scenes[s].agents()) {
      throw ShapeError("predictor returned the wrong number of samples or agents");
    }
    if (!preds.all_finite()) {
      throw std::runtime_error("evaluate: non-finite prediction for scene " + std::to_string(s));
    }
    const PredictionSet gt = ground_truth_future(scenes[s]);
    sampled.add(preds, gt, epsilon_m);
    mode.add(first_sample(preds), gt, epsilon_m);
    if (observer) observer(s, preds);
  }
  DatasetMetrics out;
  out.dataset = std::string(dataset);
  out.k = k;
  out.epsilon_m = epsilon_m;
  out.seed = seed;
  out.sampled = sampled.summary(k >= 2);
  out.mode_only = mode.summary(false);
  return out;
}

std::string metric_csv_row(const DatasetMetrics & m)
{
  const MetricSummary & s = m.sampled;
  std::string row = m.dataset;
  for (double v : {s.ade_min, s.fde_min, s.ade_mean, s.fde_mean}) row += "," + data::format_double(v);
  row += "," + (s.kde_nll ? data::format_double(*s.kde_nll) : std::string());
  row += "," + std::to_string(s.overlap_count) + "," + data::format_double(s.overlap_pct);
  return row;
}

namespace
{

using nlohmann::json;

json summary_json(const MetricSummary & s)
{
  json j{
    {"ade_min", s.ade_min},         {"ade_mean", s.ade_mean},   {"fde_min", s.fde_min},
    {"fde_mean", s.fde_mean},       {"kde_nll", nullptr},       {"overlap_count", s.overlap_count},
    {"overlap_pct", s.overlap_pct}, {"scenes", s.scenes},       {"pedestrians", s.pedestrians}};
  if (s.kde_nll) j["kde_nll"] = *s.kde_nll;
  return j;
}

MetricSummary summary_from(const json & j)
{
  MetricSummary s;
  s.ade_min = j.at("ade_min").get<double>();
  s.ade_mean = j.at("ade_mean").get<double>();
  s.fde_min = j.at("fde_min").get<double>();
  s.fde_mean = j.at("fde_mean").get<double>();
  if (!j.at("kde_nll").is_null()) s.kde_nll = j.at("kde_nll").get<double>();
  s.overlap_count = j.at("overlap_count").get<std::size_t>();
  s.overlap_pct = j.at("overlap_pct").get<double>();
  s.scenes = j.at("scenes").get<std::size_t>();
  s.pedestrians = j.at("pedestrians").get<std::size_t>();
  return s;
}

}  // namespace

std::string report_to_json(const MetricReport & report)
{
  json datasets = json::array();
  for (const auto & d : report.datasets) {
    datasets.push_back(
      {{"dataset", d.dataset},
       {"k", d.k},
       {"epsilon_m", d.epsilon_m},
       {"seed", d.seed},
       {"sampled", summary_json(d.sampled)},
       {"mode_only", summary_json(d.mode_only)}});
  }
  return json{{"datasets", datasets}}.dump(2);
}

MetricReport report_from_json(std::string_view text)
{
  try {
    const json j = json::parse(text);
    MetricReport report;
    for (const auto & d : j.at("datasets")) {
      DatasetMetrics m;
      m.dataset = d.at("dataset").get<std::string>();
      m.k = d.at("k").get<std::size_t>();
      m.epsilon_m = d.at("epsilon_m").get<double>();
      m.seed = d.at("seed").get<std::uint64_t>();
      m.sampled = summary_from(d.at("sampled"));
      m.mode_only = summary_from(d.at("mode_only"));
      report.datasets.push_back(std::move(m));
    }
    return report;
  } catch (const json::exception & e) {
    throw ParseError(0, std::string("metric report: ") + e.what());
  }
}

}  // namespace socrec::metrics
