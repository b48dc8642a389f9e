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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "socrec/errors.hpp"
#include "socrec/training.hpp"

namespace socrec::training
{

namespace
{

struct Entry
{
  std::string key;
  std::string value;
  std::size_t line = 0;
};

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<Entry> read_entries(std::istream & in)
{
  std::vector<Entry> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(n, "expected 'key = value', got '" + body + "'");
    Entry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), n};
    if (e.key.empty()) throw ParseError(n, "missing key");
    out.push_back(std::move(e));
  }
  return out;
}

double to_double(const Entry & e)
{
  double v = 0.0;
  const char * end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end || e.value.empty()) {
    throw ParseError(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  }
  return v;
}

template <typename Int>
Int to_int(const Entry & e)
{
  Int v = 0;
  const char * end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end || e.value.empty()) {
    throw ParseError(e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  }
  return v;
}

bool to_bool(const Entry & e)
{
  if (e.value == "on" || e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "off" || e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ParseError(e.line, "'" + e.key + "' expects on/off, got '" + e.value + "'");
}

using Setter = std::function<void(const Entry &)>;

void apply(const std::vector<Entry> & entries, const std::map<std::string, Setter, std::less<>> & setters, const char * what)
{
  for (const auto & e : entries) {
    const auto it = setters.find(e.key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(e.line) + ": unknown " + what + " key '" + e.key + "'");
    }
    it->second(e);
  }
}

std::map<std::string, Setter, std::less<>> train_setters(TrainConfig & c)
{
  model::HyperParams & h = c.hyper;
  data::SynthConfig & sim = c.simulator;
  return {
    {"d_m", [&](const Entry & e) { h.d_model = to_int<std::size_t>(e); }},
    {"d_ff", [&](const Entry & e) { h.d_ff = to_int<std::size_t>(e); }},
    {"d_z", [&](const Entry & e) { h.d_latent = to_int<std::size_t>(e); }},
    {"n_enc_layers", [&](const Entry & e) { h.encoder_layers = to_int<std::size_t>(e); }},
    {"n_dec_layers", [&](const Entry & e) { h.decoder_layers = to_int<std::size_t>(e); }},
    {"n_recon_dec_layers", [&](const Entry & e) { h.recon_decoder_layers = to_int<std::size_t>(e); }},
    {"n_atthead", [&](const Entry & e) { h.heads = to_int<std::size_t>(e); }},
    {"dropout", [&](const Entry & e) { h.dropout = to_double(e); }},
    {"R", [&](const Entry & e) { h.mask_ratio = to_double(e); }},
    {"epsilon", [&](const Entry & e) { h.epsilon = to_double(e); }},
    {"D", [&](const Entry & e) { h.difficulty_threshold = to_double(e); }},
    {"N_T", [&](const Entry & e) { h.threshold_epoch = to_int<int>(e); }},
    {"N_Int", [&](const Entry & e) { h.interval_epochs = to_int<int>(e); }},
    {"lr", [&](const Entry & e) { h.learning_rate = to_double(e); }},
    {"gamma", [&](const Entry & e) { h.gamma = to_double(e); }},
    {"stepsize", [&](const Entry & e) { h.step_size = to_int<int>(e); }},
    {"w1", [&](const Entry & e) { h.w_forecast = to_double(e); }},
    {"w2", [&](const Entry & e) { h.w_recon = to_double(e); }},
    {"w3", [&](const Entry & e) { h.w_social = to_double(e); }},
    {"n_epochs", [&](const Entry & e) { c.n_epochs = to_int<int>(e); }},
    {"batch_size", [&](const Entry & e) { c.batch_size = to_int<std::size_t>(e); }},
    {"seed", [&](const Entry & e) { c.seed = to_int<std::uint64_t>(e); }},
    {"data", [&](const Entry & e) { c.data_paths.push_back(e.value); }},
    {"holdout", [&](const Entry & e) { c.holdout_path = e.value; }},
    {"social_loss", [&](const Entry & e) { c.social_loss = to_bool(e); }},
    {"social_loss_squared", [&](const Entry & e) { c.social_loss_squared = to_bool(e); }},
    {"reconstructor", [&](const Entry & e) { c.reconstructor = to_bool(e); }},
    {"shuffle", [&](const Entry & e) { c.shuffle = to_bool(e); }},
    {"random_rotation", [&](const Entry & e) { c.random_rotation = to_bool(e); }},
    {"augmentation", [&](const Entry & e) { c.strategy = parse_strategy(e.value); }},
    {"sf_interaction_strength", [&](const Entry & e) { sim.interaction_strength = to_double(e); }},
    {"sf_relaxation_time", [&](const Entry & e) { sim.relaxation_time = to_double(e); }},
    {"sf_time_step", [&](const Entry & e) { sim.time_step = to_double(e); }},
    {"sf_max_repulsion", [&](const Entry & e) { sim.max_repulsion = to_double(e); }},
  };
}

}  // namespace

TrainConfig parse_train_config(std::istream & in, bool * seed_given)
{
  const std::vector<Entry> entries = read_entries(in);
  TrainConfig config;
  if (seed_given != nullptr) {
    *seed_given = std::any_of(entries.begin(), entries.end(), [](const Entry & e) { return e.key == "seed"; });
  }
  // A preset supplies the defaults that the remaining keys override, wherever it appears.
  std::vector<Entry> rest;
  for (const auto & e : entries) {
    if (e.key == "preset") {
      config.hyper = model::HyperParams::preset(e.value);
    } else {
      rest.push_back(e);
    }
  }
  apply(rest, train_setters(config), "training config");
  return config;
}

TrainConfig load_train_config(const std::filesystem::path & path, bool * seed_given)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_train_config(in, seed_given);
}

std::string train_config_text(const TrainConfig & c)
{
  const model::HyperParams & h = c.hyper;
  const auto d = [](double v) { return data::format_double(v); };
  const auto b = [](bool v) { return std::string(v ? "on" : "off"); };
  std::ostringstream out;
  out << "d_m = " << h.d_model << "\nd_ff = " << h.d_ff << "\nd_z = " << h.d_latent
      << "\nn_enc_layers = " << h.encoder_layers << "\nn_dec_layers = " << h.decoder_layers
      << "\nn_recon_dec_layers = " << h.recon_decoder_layers << "\nn_atthead = " << h.heads
      << "\ndropout = " << d(h.dropout) << "\nR = " << d(h.mask_ratio) << "\nepsilon = " << d(h.epsilon)
      << "\nD = " << d(h.difficulty_threshold) << "\nN_T = " << h.threshold_epoch
      << "\nN_Int = " << h.interval_epochs << "\nlr = " << d(h.learning_rate) << "\ngamma = " << d(h.gamma)
      << "\nstepsize = " << h.step_size << "\nw1 = " << d(h.w_forecast) << "\nw2 = " << d(h.w_recon)
      << "\nw3 = " << d(h.w_social) << "\nn_epochs = " << c.n_epochs << "\nbatch_size = " << c.batch_size
      << "\nseed = " << c.seed << "\nsocial_loss = " << b(c.social_loss)
      << "\nsocial_loss_squared = " << b(c.social_loss_squared) << "\nreconstructor = " << b(c.reconstructor)
      << "\nshuffle = " << b(c.shuffle) << "\nrandom_rotation = " << b(c.random_rotation)
      << "\naugmentation = " << to_string(c.strategy)
      << "\nsf_interaction_strength = " << d(c.simulator.interaction_strength)
      << "\nsf_relaxation_time = " << d(c.simulator.relaxation_time)
      << "\nsf_time_step = " << d(c.simulator.time_step)
      << "\nsf_max_repulsion = " << d(c.simulator.max_repulsion) << '\n';
  for (const auto & p : c.data_paths) out << "data = " << p << '\n';
  if (!c.holdout_path.empty()) out << "holdout = " << c.holdout_path << '\n';
  return out.str();
}

std::uint64_t config_hash(const TrainConfig & config)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : train_config_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

data::SynthConfig parse_synth_config(std::istream & in, std::optional<std::uint64_t> * seed)
{
  data::SynthConfig c;
  std::map<std::string, Setter, std::less<>> setters{
    {"n_scenes", [&](const Entry & e) { c.n_scenes = to_int<std::size_t>(e); }},
    {"agents_min", [&](const Entry & e) { c.agents_min = to_int<std::size_t>(e); }},
    {"agents_max", [&](const Entry & e) { c.agents_max = to_int<std::size_t>(e); }},
    {"speed_min", [&](const Entry & e) { c.speed_min = to_double(e); }},
    {"speed_max", [&](const Entry & e) { c.speed_max = to_double(e); }},
    {"interaction_strength", [&](const Entry & e) { c.interaction_strength = to_double(e); }},
    {"heading_noise", [&](const Entry & e) { c.heading_noise = to_double(e); }},
    {"arena_radius", [&](const Entry & e) { c.arena_radius = to_double(e); }},
    {"relaxation_time", [&](const Entry & e) { c.relaxation_time = to_double(e); }},
    {"time_step", [&](const Entry & e) { c.time_step = to_double(e); }},
    {"max_repulsion", [&](const Entry & e) { c.max_repulsion = to_double(e); }},
    {"seed", [&](const Entry & e) {
       if (seed != nullptr) *seed = to_int<std::uint64_t>(e);
     }},
  };
  apply(read_entries(in), setters, "synthetic-data config");
  c.validate();
  return c;
}

data::SynthConfig load_synth_config(const std::filesystem::path & path, std::optional<std::uint64_t> * seed)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_synth_config(in, seed);
}

}  // namespace socrec::training
