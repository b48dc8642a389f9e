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

#include "socrec/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "socrec/curriculum.hpp"
#include "socrec/errors.hpp"
#include "socrec/metrics.hpp"
#include "socrec/synth.hpp"
#include "socrec/training.hpp"

namespace socrec::cli
{

namespace fs = std::filesystem;

namespace
{

std::uint64_t entropy_seed()
{
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::ofstream open_output(const fs::path & path, std::ios::openmode mode = std::ios::out)
{
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_text(const fs::path & path, const std::string & text)
{
  auto out = open_output(path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void ensure_directory(const std::string & dir)
{
  if (dir.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir);
}

std::vector<data::Scene> load_all(const std::vector<std::string> & paths)
{
  std::vector<data::Scene> scenes;
  for (const auto & p : paths) {
    if (!fs::exists(p)) throw std::runtime_error("data file " + p + " does not exist");
    auto part = data::load_scenes(p);
    scenes.insert(scenes.end(), part.begin(), part.end());
  }
  return scenes;
}

std::string dataset_name(const std::string & path)
{
  return fs::path(path).stem().string();
}

std::string hex(std::uint64_t v)
{
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

/// Resolves the training configuration from the config file and command-line overrides.
training::TrainConfig resolve_config(const TrainOptions & o)
{
  training::TrainConfig config;
  bool seed_given = false;
  if (!o.config.empty()) config = training::load_train_config(o.config, &seed_given);
  if (!o.data.empty()) config.data_paths = o.data;
  if (!o.holdout.empty()) config.holdout_path = o.holdout;
  if (o.strategy) config.strategy = training::parse_strategy(*o.strategy);
  if (o.epochs) config.n_epochs = *o.epochs;
  if (o.seed) {
    config.seed = *o.seed;
  } else if (!seed_given) {
    config.seed = entropy_seed();
  }
  if (config.data_paths.empty()) throw ConfigError("no training data (--data or a 'data' config key)");
  config.validate();
  return config;
}

metrics::DatasetMetrics evaluate_file(
  const model::Model & model, const std::string & path, std::size_t k, double epsilon, std::uint64_t seed,
  const metrics::PredictionObserver & observer = {})
{
  const auto scenes = load_all({path});
  return metrics::evaluate(
    metrics::model_predictor(model), scenes, dataset_name(path), k, epsilon, seed, thread_count(), observer);
}

struct TrainOutcome
{
  training::TrainConfig config;
  training::TrainState state;
  std::optional<metrics::DatasetMetrics> holdout;
};

TrainOutcome train_into(const TrainOptions & o, const training::TrainConfig & base, CommandResult & result, std::ostream & log)
{
  ensure_directory(o.out);
  const fs::path dir(o.out);
  training::TrainConfig config = base;
  std::optional<training::TrainState> resume;
  if (!o.resume.empty()) {
    training::Checkpoint ck = training::load_checkpoint(o.resume);
    if (!ck.config.hyper.same_architecture(config.hyper)) {
      throw ConfigError("checkpoint " + o.resume + " was trained with a different architecture");
    }
    log << "resuming from epoch " << ck.state.epoch << '\n';
    resume = std::move(ck.state);
  }
  const std::vector<data::Scene> scenes = load_all(config.data_paths);
  log << "training on " << scenes.size() << " scenes, seed " << config.seed << ", augmentation "
      << training::to_string(config.strategy) << '\n';

  const fs::path checkpoint = dir / "checkpoint.bin";
  std::size_t pools_written = 0;
  auto on_epoch = [&](const training::TrainState & s) {
    const auto & e = s.report.epochs.back();
    log << "epoch " << e.epoch << " total " << data::format_double(e.losses.total) << '\n';
    if (s.report.refresh_epochs.size() > pools_written) {
      pools_written = s.report.refresh_epochs.size();
      const fs::path pool = dir / ("pool_epoch" + std::to_string(s.report.refresh_epochs.back()) + ".txt");
      auto out = open_output(pool);
      curriculum::write_pool(out, s.pool);
    }
    training::TrainState copy = s;
    copy.report.checkpoint_path = checkpoint.string();
    training::save_checkpoint(checkpoint, copy, config);
  };
  training::TrainState state = training::train(config, scenes, std::move(resume), on_epoch);
  state.report.checkpoint_path = checkpoint.string();
  training::save_checkpoint(checkpoint, state, config);

  TrainOutcome outcome{config, std::move(state), std::nullopt};
  std::string metrics_json;
  if (!config.holdout_path.empty()) {
    const double eps = o.epsilon.value_or(config.hyper.epsilon);
    outcome.holdout = evaluate_file(outcome.state.model, config.holdout_path, o.k, eps, config.seed);
    metrics_json = metrics::report_to_json({{*outcome.holdout}});
  }
  {
    auto out = open_output(dir / "train_log.csv");
    training::write_loss_log(out, outcome.state.report);
  }
  write_text(dir / "summary.json", training::run_summary_json(config, outcome.state.report, metrics_json) + "\n");
  write_text(dir / "config.txt", training::train_config_text(config));
  for (const char * name : {"checkpoint.bin", "train_log.csv", "summary.json", "config.txt"}) {
    result.artifacts.push_back(dir / name);
  }
  log << "config hash " << hex(training::config_hash(config)) << ", refreshes " << outcome.state.report.refresh_epochs.size()
      << '\n';
  return outcome;
}

CommandResult sweep(const SweepOptions & o, std::ostream & log, const char * column, double model::HyperParams::*field)
{
  if (o.values.empty()) throw ConfigError("--values needs at least one value");
  if (o.train.holdout.empty() && o.train.config.empty()) throw ConfigError("--holdout is required");
  training::TrainConfig base = resolve_config(o.train);
  if (base.holdout_path.empty()) throw ConfigError("--holdout is required");
  ensure_directory(o.train.out);
  CommandResult result;
  std::ostringstream csv;
  csv << column << ',' << metrics::kMetricCsvHeader.substr(metrics::kMetricCsvHeader.find(',') + 1) << '\n';
  for (std::size_t i = 0; i < o.values.size(); ++i) {
    training::TrainConfig config = base;
    config.hyper.*field = o.values[i];
    config.validate();
    TrainOptions run = o.train;
    run.out = (fs::path(o.train.out) / ("run" + std::to_string(i))).string();
    run.resume.clear();
    log << column << " = " << data::format_double(o.values[i]) << '\n';
    const TrainOutcome outcome = train_into(run, config, result, log);
    const std::string row = metrics::metric_csv_row(*outcome.holdout);
    csv << data::format_double(o.values[i]) << row.substr(row.find(',')) << '\n';
  }
  const fs::path path = fs::path(o.train.out) / "sweep.csv";
  write_text(path, csv.str());
  result.artifacts.push_back(path);
  return result;
}

}  // namespace

std::size_t thread_count()
{
  const char * env = std::getenv("SOCREC_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  const std::string_view text(env);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size() || n == 0) {
    throw ConfigError("SOCREC_THREADS must be a positive integer, got '" + std::string(text) + "'");
  }
  return n;
}

CommandResult cmd_synth(const SynthOptions & o, std::ostream & log)
{
  if (o.out.empty()) throw ConfigError("--out is required");
  std::optional<std::uint64_t> config_seed;
  data::SynthConfig config;
  if (!o.config.empty()) config = training::load_synth_config(o.config, &config_seed);
  const std::uint64_t seed = o.seed ? *o.seed : config_seed ? *config_seed : entropy_seed();
  const auto scenes = data::generate_synthetic_dataset(config, seed);
  data::save_dataset(o.out, scenes);
  std::size_t agents = 0;
  for (const auto & s : scenes) agents += s.agents();
  log << "wrote " << scenes.size() << " scenes with " << agents << " agents (seed " << seed << ") to " << o.out << '\n';
  return {0, {o.out}};
}

CommandResult cmd_train(const TrainOptions & o, std::ostream & log)
{
  CommandResult result;
  TrainOptions options = o;
  training::TrainConfig config;
  if (!o.resume.empty() && o.config.empty()) {
    // Continue with the checkpoint's own configuration.
    config = training::load_checkpoint(o.resume).config;
    if (!o.data.empty()) config.data_paths = o.data;
    if (!o.holdout.empty()) config.holdout_path = o.holdout;
    if (o.epochs) config.n_epochs = *o.epochs;
    if (o.strategy) config.strategy = training::parse_strategy(*o.strategy);
    if (o.seed) config.seed = *o.seed;
    config.validate();
  } else {
    config = resolve_config(o);
  }
  train_into(options, config, result, log);
  return result;
}

CommandResult cmd_eval(const EvalOptions & o, std::ostream & log)
{
  if (o.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  std::vector<std::string> files = o.data;
  if (!o.holdout.empty()) files.push_back(o.holdout);
  if (files.empty()) throw ConfigError("no evaluation data (--data or --holdout)");
  if (o.k == 0) throw ConfigError("--k must be >= 1");
  ensure_directory(o.out);
  const training::Checkpoint ck = training::load_checkpoint(o.checkpoint);
  const double eps = o.epsilon.value_or(ck.config.hyper.epsilon);
  const std::uint64_t seed = o.seed.value_or(ck.config.seed);
  const fs::path dir(o.out);
  CommandResult result;

  metrics::MetricReport report;
  for (const auto & file : files) {
    const fs::path dump = dir / ("predictions_" + dataset_name(file) + ".csv");
    auto out = open_output(dump);
    out << "scene_id,ped_id,sample_k,t,x,y\n";
    const auto scenes = load_all({file});
    auto observer = [&](std::size_t s, const PredictionSet & preds) {
      for (std::size_t a = 0; a < preds.agents; ++a) {
        for (std::size_t k = 0; k < preds.samples; ++k) {
          for (std::size_t t = 0; t < data::Scene::kFutureSteps; ++t) {
            const data::Vec2 p = preds.at(k, a, t);
            out << s << ',' << scenes[s].ped_ids[a] << ',' << k << ',' << t << ',' << data::format_double(p.x) << ','
                << data::format_double(p.y) << '\n';
          }
        }
      }
    };
    report.datasets.push_back(metrics::evaluate(
      metrics::model_predictor(ck.state.model), scenes, dataset_name(file), o.k, eps, seed, thread_count(), observer));
    result.artifacts.push_back(dump);
    const auto & m = report.datasets.back();
    log << m.dataset << ": ADE " << data::format_double(m.sampled.ade_min) << " FDE "
        << data::format_double(m.sampled.fde_min) << " overlap " << data::format_double(m.sampled.overlap_pct) << "%\n";
  }
  write_text(dir / "metrics.json", metrics::report_to_json(report) + "\n");
  std::ostringstream csv;
  csv << metrics::kMetricCsvHeader << '\n';
  for (const auto & m : report.datasets) csv << metrics::metric_csv_row(m) << '\n';
  write_text(dir / "metrics.csv", csv.str());
  result.artifacts.push_back(dir / "metrics.json");
  result.artifacts.push_back(dir / "metrics.csv");
  return result;
}

CommandResult cmd_sweep_epsilon(const SweepOptions & o, std::ostream & log)
{
  return sweep(o, log, "epsilon", &model::HyperParams::epsilon);
}

CommandResult cmd_sweep_d(const SweepOptions & o, std::ostream & log)
{
  return sweep(o, log, "D", &model::HyperParams::difficulty_threshold);
}

namespace
{

void add_train_flags(CLI::App & app, TrainOptions & o)
{
  app.add_option("--config", o.config, "Training config file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--data", o.data, "Training data file; repeat for several")->check(CLI::ExistingFile);
  app.add_option("--holdout", o.holdout, "Held-out data file evaluated after training")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory")->required();
  app.add_option("--seed", o.seed, "Run seed (drawn from entropy and recorded when omitted)");
  app.add_option("--strategy", o.strategy, "Augmentation: difficulty, random, inverse, none, linear1, linear2, "
                                           "social-force, pretrained-recon, initial-aug");
  app.add_option("--epochs", o.epochs, "Number of training epochs")->check(CLI::PositiveNumber);
  app.add_option("--k", o.k, "Samples per scene for the holdout evaluation")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", o.epsilon, "Overlap distance for the holdout evaluation, meters")
    ->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Pedestrian trajectory forecasting with social losses and curriculum augmentation", "socrec"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto * synth_cmd = app.add_subcommand("synth", "Generate a synthetic crowd dataset");
  synth_cmd->add_option("--config", synth.config, "Simulator config file (key = value)")->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth.out, "Dataset file to write")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");

  TrainOptions train;
  auto * train_cmd = app.add_subcommand("train", "Train a model");
  add_train_flags(*train_cmd, train);
  train_cmd->add_option("--resume", train.resume, "Checkpoint to continue from")->check(CLI::ExistingFile);

  EvalOptions eval;
  auto * eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval.data, "Evaluation data file; repeat for several")->check(CLI::ExistingFile);
  eval_cmd->add_option("--holdout", eval.holdout, "Evaluation data file")->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval.out, "Output directory")->required();
  eval_cmd->add_option("--k", eval.k, "Samples per scene")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--epsilon", eval.epsilon, "Overlap distance, meters (default: training epsilon)")
    ->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--seed", eval.seed, "Sampling seed (default: training seed)");

  SweepOptions sweep_eps, sweep_d;
  auto * eps_cmd = app.add_subcommand("sweep-epsilon", "Retrain for each social-loss epsilon and evaluate");
  add_train_flags(*eps_cmd, sweep_eps.train);
  eps_cmd->add_option("--values", sweep_eps.values, "Epsilon values")->required()->delimiter(',');
  auto * d_cmd = app.add_subcommand("sweep-d", "Retrain for each difficulty threshold D and evaluate");
  add_train_flags(*d_cmd, sweep_d.train);
  d_cmd->add_option("--values", sweep_d.values, "D values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e, out, err);
  }

  try {
    CommandResult result;
    if (*synth_cmd) result = cmd_synth(synth, out);
    if (*train_cmd) result = cmd_train(train, out);
    if (*eval_cmd) result = cmd_eval(eval, out);
    if (*eps_cmd) result = cmd_sweep_epsilon(sweep_eps, out);
    if (*d_cmd) result = cmd_sweep_d(sweep_d, out);
    for (const auto & path : result.artifacts) out << "wrote " << path.string() << '\n';
    return result.exit_code;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace socrec::cli
