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

#include "socrec/model.hpp"

#include <cmath>
#include <stdexcept>

#include "socrec/errors.hpp"

namespace socrec::model
{

using data::Scene;

// ---- hyperparameters --------------------------------------------------------

HyperParams HyperParams::preset(std::string_view dataset)
{
  HyperParams h;  // eth
  if (dataset == "eth") return h;
  if (dataset == "hotel") {
    h.d_model = 64, h.d_ff = 256, h.encoder_layers = 2, h.threshold_epoch = 20;
    h.mask_ratio = 10, h.step_size = 20;
  } else if (dataset == "univ") {
    h.d_model = 64, h.d_ff = 128, h.encoder_layers = 2, h.epsilon = 0.05;
    h.threshold_epoch = 20, h.mask_ratio = 10, h.step_size = 20;
  } else if (dataset == "zara1") {
    h.d_model = 256, h.d_ff = 512, h.threshold_epoch = 20, h.mask_ratio = 30;
    h.gamma = 0.5, h.step_size = 10;
  } else if (dataset == "zara2") {
    h.d_model = 128, h.d_ff = 512, h.encoder_layers = 2, h.threshold_epoch = 20;
    h.mask_ratio = 20, h.step_size = 40;
  } else if (dataset == "sdd") {
    h.d_model = 128, h.d_ff = 256, h.threshold_epoch = 10, h.mask_ratio = 10, h.step_size = 10;
  } else {
    throw ConfigError("unknown preset '" + std::string(dataset) + "'");
  }
  return h;
}

void HyperParams::validate() const
{
  auto fail = [](const std::string & what) { throw ConfigError("hyperparameter " + what); };
  if (d_model == 0 || d_ff == 0 || d_latent == 0 || heads == 0) fail("dimensions must be positive");
  if (encoder_layers == 0 || decoder_layers == 0 || recon_decoder_layers == 0) {
    fail("layer counts must be positive");
  }
  if (d_model % heads != 0) {
    fail("d_m=" + std::to_string(d_model) + " is not divisible by n_atthead=" + std::to_string(heads));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(mask_ratio >= 0.0 && mask_ratio <= 100.0)) fail("R must lie in [0, 100]");
  if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
  if (!(difficulty_threshold >= 0.0 && difficulty_threshold <= 1.0)) fail("D must lie in [0, 1]");
  if (threshold_epoch < 1 || interval_epochs < 1) fail("N_T and N_Int must be >= 1");
  if (!(learning_rate >= 0.0)) fail("lr must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  if (step_size < 1) fail("stepsize must be >= 1");
  if (!(w_forecast >= 0.0 && w_recon >= 0.0 && w_social >= 0.0)) fail("loss weights must be >= 0");
}

bool HyperParams::same_architecture(const HyperParams & o) const
{
  return d_model == o.d_model && d_ff == o.d_ff && d_latent == o.d_latent &&
         encoder_layers == o.encoder_layers && decoder_layers == o.decoder_layers &&
         recon_decoder_layers == o.recon_decoder_layers && heads == o.heads;
}

// ---- token helpers ----------------------------------------------------------

Tensor past_tokens(const Scene & scene)
{
  const std::size_t n = scene.agents();
  Tensor out(Scene::kPastSteps * n, 3);
  for (std::size_t t = 0; t < Scene::kPastSteps; ++t) {
    for (std::size_t a = 0; a < n; ++a) {
      out(t * n + a, 0) = static_cast<Scalar>(scene.at(a, t).x);
      out(t * n + a, 1) = static_cast<Scalar>(scene.at(a, t).y);
    }
  }
  return out;
}

Tensor past_tokens(const data::MaskedPast & masked)
{
  const std::size_t n = masked.agents;
  Tensor out(Scene::kPastSteps * n, 3);
  for (std::size_t t = 0; t < Scene::kPastSteps; ++t) {
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t cell = a * Scene::kPastSteps + t;
      out(t * n + a, 0) = static_cast<Scalar>(masked.positions[cell].x);
      out(t * n + a, 1) = static_cast<Scalar>(masked.positions[cell].y);
      out(t * n + a, 2) = masked.indicator[cell] ? Scalar{1} : Scalar{0};
    }
  }
  return out;
}

namespace
{

Tensor positions_between(const Scene & scene, std::size_t first, std::size_t steps)
{
  const std::size_t n = scene.agents();
  Tensor out(steps * n, 2);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t a = 0; a < n; ++a) {
      out(t * n + a, 0) = static_cast<Scalar>(scene.at(a, first + t).x);
      out(t * n + a, 1) = static_cast<Scalar>(scene.at(a, first + t).y);
    }
  }
  return out;
}

// Row i of the result selects agent (i mod N) from an N-row tensor.
std::vector<std::size_t> tile_agents(std::size_t agents, std::size_t steps)
{
  std::vector<std::size_t> idx(agents * steps);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i % agents;
  return idx;
}

std::vector<std::size_t> step_rows(std::size_t agents, std::size_t step)
{
  std::vector<std::size_t> idx(agents);
  for (std::size_t a = 0; a < agents; ++a) idx[a] = step * agents + a;
  return idx;
}

void require_agents(const Var & v, std::size_t rows, const char * what)
{
  if (v.rows() != rows) {
    throw ShapeError(
      std::string(what) + ": expected " + std::to_string(rows) + " rows, got " +
      std::to_string(v.rows()));
  }
}

}  // namespace

Tensor future_positions(const Scene & scene)
{
  return positions_between(scene, Scene::kPastSteps, Scene::kFutureSteps);
}

Tensor past_positions(const Scene & scene)
{
  return positions_between(scene, 0, Scene::kPastSteps);
}

Tensor temporal_encoding(std::size_t agents, std::size_t first_step, std::size_t steps, std::size_t d_model)
{
  Tensor out(agents * steps, d_model);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(first_step + s);
    for (std::size_t c = 0; c < d_model; ++c) {
      const double freq = std::pow(10000.0, -static_cast<double>(c - c % 2) / static_cast<double>(d_model));
      const auto v = static_cast<Scalar>(c % 2 == 0 ? std::sin(t * freq) : std::cos(t * freq));
      for (std::size_t a = 0; a < agents; ++a) out(s * agents + a, c) = v;
    }
  }
  return out;
}

// ---- construction -----------------------------------------------------------

Model::LinearIds Model::make_linear(const std::string & name, std::size_t in, std::size_t out, Rng & rng)
{
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> u(-limit, limit);
  Tensor w(in, out);
  for (auto & v : w.values()) v = static_cast<Scalar>(u(rng));
  LinearIds ids{};
  ids.weight = params_.add(name + ".w", std::move(w)).index;
  ids.bias = params_.add(name + ".b", Tensor(1, out)).index;
  return ids;
}

Model::NormIds Model::make_norm(const std::string & name)
{
  NormIds ids{};
  ids.gain = params_.add(name + ".g", Tensor(1, hyper_.d_model, Scalar{1})).index;
  ids.bias = params_.add(name + ".b", Tensor(1, hyper_.d_model)).index;
  return ids;
}

Model::AttentionIds Model::make_attention(const std::string & name, Rng & rng)
{
  const std::size_t d = hyper_.d_model;
  const double limit = std::sqrt(6.0 / static_cast<double>(2 * d));
  std::uniform_real_distribution<double> u(-limit, limit);
  auto square = [&](const char * suffix) {
    Tensor w(d, d);
    for (auto & v : w.values()) v = static_cast<Scalar>(u(rng));
    return params_.add(name + suffix, std::move(w)).index;
  };
  AttentionIds ids{};
  ids.query_self = square(".q_self");
  ids.query_other = square(".q_other");
  ids.key_self = square(".k_self");
  ids.key_other = square(".k_other");
  ids.value = square(".v");
  ids.out = make_linear(name + ".out", d, d, rng);
  return ids;
}

Model::EncoderLayerIds Model::make_encoder_layer(const std::string & name, Rng & rng)
{
  EncoderLayerIds ids{};
  ids.attn = make_attention(name + ".attn", rng);
  ids.norm1 = make_norm(name + ".norm1");
  ids.ff1 = make_linear(name + ".ff1", hyper_.d_model, hyper_.d_ff, rng);
  ids.ff2 = make_linear(name + ".ff2", hyper_.d_ff, hyper_.d_model, rng);
  ids.norm2 = make_norm(name + ".norm2");
  return ids;
}

Model::DecoderLayerIds Model::make_decoder_layer(const std::string & name, Rng & rng)
{
  DecoderLayerIds ids{};
  ids.self_attn = make_attention(name + ".self", rng);
  ids.norm1 = make_norm(name + ".norm1");
  ids.cross_attn = make_attention(name + ".cross", rng);
  ids.norm2 = make_norm(name + ".norm2");
  ids.ff1 = make_linear(name + ".ff1", hyper_.d_model, hyper_.d_ff, rng);
  ids.ff2 = make_linear(name + ".ff2", hyper_.d_ff, hyper_.d_model, rng);
  ids.norm3 = make_norm(name + ".norm3");
  return ids;
}

Model::Model(const HyperParams & hyper, std::uint64_t init_seed) : hyper_(hyper)
{
  hyper_.validate();
  Rng rng = make_rng(init_seed, {tag(Stream::init)});
  const std::size_t d = hyper_.d_model, dz = hyper_.d_latent;

  input_embed_ = make_linear("encoder.embed", 3, d, rng);
  for (std::size_t l = 0; l < hyper_.encoder_layers; ++l) {
    encoder_.push_back(make_encoder_layer("encoder.layer" + std::to_string(l), rng));
  }
  prior_head_ = make_linear("cpn", d, 2 * dz, rng);

  ppdn_embed_ = make_linear("ppdn.embed", 2, d, rng);
  ppdn_layer_.cross_attn = make_attention("ppdn.cross", rng);
  ppdn_layer_.norm1 = make_norm("ppdn.norm1");
  ppdn_layer_.ff1 = make_linear("ppdn.ff1", d, hyper_.d_ff, rng);
  ppdn_layer_.ff2 = make_linear("ppdn.ff2", hyper_.d_ff, d, rng);
  ppdn_layer_.norm2 = make_norm("ppdn.norm2");
  ppdn_head_ = make_linear("ppdn.head", d, 2 * dz, rng);

  future_embed_ = make_linear("decoder.embed", 2, d, rng);
  future_latent_ = make_linear("decoder.latent", dz, d, rng);
  for (std::size_t l = 0; l < hyper_.decoder_layers; ++l) {
    future_decoder_.push_back(make_decoder_layer("decoder.layer" + std::to_string(l), rng));
  }
  future_out_ = make_linear("decoder.out", d, 2, rng);

  first_recon_only_ = params_.size();
  recon_head_ = make_linear("rpdn", d, 2 * dz, rng);
  recon_embed_ = make_linear("recon.embed", 3, d, rng);
  recon_latent_ = make_linear("recon.latent", dz, d, rng);
  for (std::size_t l = 0; l < hyper_.recon_decoder_layers; ++l) {
    recon_decoder_.push_back(make_decoder_layer("recon.layer" + std::to_string(l), rng));
  }
  recon_out_ = make_linear("recon.out", d, 2, rng);
}

std::vector<std::size_t> Model::reconstructor_only_parameters() const
{
  std::vector<std::size_t> ids;
  for (std::size_t i = first_recon_only_; i < params_.size(); ++i) ids.push_back(i);
  return ids;
}

// ---- building blocks --------------------------------------------------------

Var Model::param(ForwardContext & ctx, std::size_t id) const
{
  return ctx.graph.param(params_[id]);
}

Var Model::apply_linear(ForwardContext & ctx, const LinearIds & ids, Var x) const
{
  return nn::linear(x, param(ctx, ids.weight), param(ctx, ids.bias));
}

Var Model::apply_norm(ForwardContext & ctx, const NormIds & ids, Var x) const
{
  return nn::layer_norm(x, param(ctx, ids.gain), param(ctx, ids.bias));
}

Var Model::apply_dropout(ForwardContext & ctx, Var x) const
{
  if (ctx.mode != Mode::training || ctx.dropout_rng == nullptr || hyper_.dropout <= 0.0) return x;
  return nn::dropout(x, static_cast<Scalar>(hyper_.dropout), *ctx.dropout_rng);
}

Var Model::apply_attention(
  ForwardContext & ctx, const AttentionIds & ids, Var query, Var memory,
  const nn::AgentMask & mask, const Tensor * causal) const
{
  nn::AttentionProjections<Scalar> w{
    param(ctx, ids.query_self), param(ctx, ids.query_other), param(ctx, ids.key_self),
    param(ctx, ids.key_other), param(ctx, ids.value)};
  const Var heads = nn::agent_aware_attention(query, memory, memory, mask, w, hyper_.heads, causal);
  return apply_linear(ctx, ids.out, heads);
}

Var Model::apply_feed_forward(ForwardContext & ctx, const LinearIds & ff1, const LinearIds & ff2, Var x) const
{
  return apply_linear(ctx, ff2, nn::relu(apply_linear(ctx, ff1, x)));
}

Var Model::run_decoder(
  ForwardContext & ctx, const std::vector<DecoderLayerIds> & layers, Var x, Var memory,
  std::size_t agents, std::size_t steps, std::size_t memory_steps, bool causal) const
{
  const nn::AgentMask self_mask = nn::build_agent_mask(agents, steps);
  const nn::AgentMask cross_mask = nn::build_agent_mask(agents, steps, memory_steps);
  const Tensor causal_bits = causal ? nn::causal_mask<Scalar>(agents, steps) : Tensor();
  const Tensor * causal_ptr = causal ? &causal_bits : nullptr;
  for (const auto & layer : layers) {
    x = apply_norm(ctx, layer.norm1, x + apply_dropout(ctx, apply_attention(ctx, layer.self_attn, x, x, self_mask, causal_ptr)));
    x = apply_norm(ctx, layer.norm2, x + apply_dropout(ctx, apply_attention(ctx, layer.cross_attn, x, memory, cross_mask, nullptr)));
    x = apply_norm(ctx, layer.norm3, x + apply_dropout(ctx, apply_feed_forward(ctx, layer.ff1, layer.ff2, x)));
  }
  return x;
}

Var Model::latent_per_token(
  ForwardContext & ctx, const LinearIds & proj, Var z, std::size_t agents, std::size_t steps) const
{
  return nn::gather_rows(apply_linear(ctx, proj, z), tile_agents(agents, steps));
}

Gaussian Model::gaussian_head(ForwardContext & ctx, const LinearIds & head, Var pooled) const
{
  const Var out = apply_linear(ctx, head, pooled);
  const std::size_t dz = hyper_.d_latent;
  return nn::gaussian_from_log_var(nn::slice_cols(out, 0, dz), nn::slice_cols(out, dz, 2 * dz));
}

// ---- forward pieces ---------------------------------------------------------

Var Model::encode(ForwardContext & ctx, const Tensor & tokens, std::size_t agents) const
{
  if (agents == 0) throw std::invalid_argument("encode: no agents");
  if (tokens.rows() != Scene::kPastSteps * agents || tokens.cols() != 3) {
    throw ShapeError("encode: expected " + std::to_string(Scene::kPastSteps * agents) + "x3 tokens, got " + nn::shape_string(tokens));
  }
  if (!tokens.all_finite()) throw std::invalid_argument("encode: non-finite input");
  Graph & g = ctx.graph;
  Var x = apply_linear(ctx, input_embed_, g.constant(tokens)) +
          g.constant(temporal_encoding(agents, 0, Scene::kPastSteps, hyper_.d_model));
  x = apply_dropout(ctx, x);
  const nn::AgentMask mask = nn::build_agent_mask(agents, Scene::kPastSteps);
  for (const auto & layer : encoder_) {
    x = apply_norm(ctx, layer.norm1, x + apply_dropout(ctx, apply_attention(ctx, layer.attn, x, x, mask, nullptr)));
    x = apply_norm(ctx, layer.norm2, x + apply_dropout(ctx, apply_feed_forward(ctx, layer.ff1, layer.ff2, x)));
  }
  return x;
}

Gaussian Model::prior_params(ForwardContext & ctx, Var features, std::size_t agents) const
{
  require_agents(features, Scene::kPastSteps * agents, "prior_params");
  return gaussian_head(ctx, prior_head_, nn::gather_rows(features, step_rows(agents, Scene::kPastSteps - 1)));
}

Gaussian Model::posterior_params_recon(ForwardContext & ctx, Var masked_features, std::size_t agents) const
{
  require_agents(masked_features, Scene::kPastSteps * agents, "posterior_params_recon");
  return gaussian_head(ctx, recon_head_, nn::gather_rows(masked_features, step_rows(agents, Scene::kPastSteps - 1)));
}

Gaussian Model::posterior_params_forecast(
  ForwardContext & ctx, Var features, const Tensor & future, std::size_t agents) const
{
  if (ctx.mode != Mode::training) {
    throw ContractError("posterior_params_forecast needs the ground-truth future (training only)");
  }
  require_agents(features, Scene::kPastSteps * agents, "posterior_params_forecast");
  if (future.rows() != Scene::kFutureSteps * agents || future.cols() != 2) {
    throw ShapeError("posterior_params_forecast: future is " + nn::shape_string(future));
  }
  Graph & g = ctx.graph;
  Var f = apply_linear(ctx, ppdn_embed_, g.constant(future)) +
          g.constant(temporal_encoding(agents, Scene::kPastSteps, Scene::kFutureSteps, hyper_.d_model));
  const nn::AgentMask mask = nn::build_agent_mask(agents, Scene::kFutureSteps, Scene::kPastSteps);
  f = apply_norm(ctx, ppdn_layer_.norm1, f + apply_dropout(ctx, apply_attention(ctx, ppdn_layer_.cross_attn, f, features, mask, nullptr)));
  f = apply_norm(ctx, ppdn_layer_.norm2, f + apply_dropout(ctx, apply_feed_forward(ctx, ppdn_layer_.ff1, ppdn_layer_.ff2, f)));
  // Mean over each agent's future tokens.
  Tensor pool(agents, Scene::kFutureSteps * agents);
  for (std::size_t i = 0; i < pool.cols(); ++i) {
    pool(i % agents, i) = Scalar{1} / static_cast<Scalar>(Scene::kFutureSteps);
  }
  return gaussian_head(ctx, ppdn_head_, nn::matmul(g.constant(std::move(pool)), f));
}

Var Model::future_decoder_tokens(ForwardContext & ctx, Var inputs, Var z_tokens, std::size_t agents) const
{
  const std::size_t steps = inputs.rows() / agents;
  return apply_linear(ctx, future_embed_, inputs) +
         ctx.graph.constant(temporal_encoding(agents, Scene::kPastSteps, steps, hyper_.d_model)) + z_tokens;
}

Var Model::decode_future_teacher(
  ForwardContext & ctx, Var features, Var z, const Tensor & last_observed, const Tensor & future,
  std::size_t agents) const
{
  if (ctx.mode != Mode::training) {
    throw ContractError("teacher forcing is only available in training mode");
  }
  require_agents(features, Scene::kPastSteps * agents, "decode_future");
  require_agents(z, agents, "decode_future latent");
  if (last_observed.rows() != agents || future.rows() != Scene::kFutureSteps * agents) {
    throw ShapeError("decode_future: teacher input shapes do not match the agent count");
  }
  Graph & g = ctx.graph;
  const std::size_t steps = Scene::kFutureSteps;
  // Step s sees the position at step s - 1 (the last observation for s = 0).
  Tensor shifted(steps * agents, 2);
  for (std::size_t a = 0; a < agents; ++a) {
    shifted(a, 0) = last_observed(a, 0);
    shifted(a, 1) = last_observed(a, 1);
  }
  for (std::size_t r = agents; r < shifted.rows(); ++r) {
    shifted(r, 0) = future(r - agents, 0);
    shifted(r, 1) = future(r - agents, 1);
  }
  const Var z_tokens = latent_per_token(ctx, future_latent_, z, agents, steps);
  const Var x = future_decoder_tokens(ctx, g.constant(std::move(shifted)), z_tokens, agents);
  const Var h = run_decoder(ctx, future_decoder_, x, features, agents, steps, Scene::kPastSteps, true);
  const Var displacement = apply_linear(ctx, future_out_, h);

  Tensor cumulative(steps * agents, steps * agents);
  Tensor origin(steps * agents, 2);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t a = 0; a < agents; ++a) {
      for (std::size_t r = 0; r <= s; ++r) cumulative(s * agents + a, r * agents + a) = Scalar{1};
      origin(s * agents + a, 0) = last_observed(a, 0);
      origin(s * agents + a, 1) = last_observed(a, 1);
    }
  }
  return nn::matmul(g.constant(std::move(cumulative)), displacement) + g.constant(std::move(origin));
}

Var Model::decode_future_autoregressive(
  ForwardContext & ctx, Var features, Var z, const Tensor & last_observed, std::size_t agents) const
{
  require_agents(features, Scene::kPastSteps * agents, "decode_future");
  require_agents(z, agents, "decode_future latent");
  if (last_observed.rows() != agents) throw ShapeError("decode_future: last position rows");
  Graph & g = ctx.graph;
  const Var z_proj = apply_linear(ctx, future_latent_, z);
  std::vector<Var> inputs{g.constant(last_observed)};
  std::vector<Var> positions;
  Var current = inputs.front();
  for (std::size_t s = 0; s < Scene::kFutureSteps; ++s) {
    const std::size_t steps = s + 1;
    const Var x = future_decoder_tokens(
      ctx, steps == 1 ? inputs.front() : nn::concat_rows(inputs),
      nn::gather_rows(z_proj, tile_agents(agents, steps)), agents);
    const Var h = run_decoder(ctx, future_decoder_, x, features, agents, steps, Scene::kPastSteps, true);
    const Var last = nn::gather_rows(h, step_rows(agents, s));
    current = current + apply_linear(ctx, future_out_, last);
    positions.push_back(current);
    inputs.push_back(current);
  }
  return nn::concat_rows(positions);
}

Var Model::decode_reconstruction(
  ForwardContext & ctx, Var masked_features, const Tensor & masked_tokens, Var z,
  std::size_t agents) const
{
  require_agents(masked_features, Scene::kPastSteps * agents, "decode_reconstruction");
  require_agents(z, agents, "decode_reconstruction latent");
  if (!z.value().all_finite()) throw std::invalid_argument("decode_reconstruction: non-finite latent");
  if (masked_tokens.rows() != Scene::kPastSteps * agents || masked_tokens.cols() != 3) {
    throw ShapeError("decode_reconstruction: tokens are " + nn::shape_string(masked_tokens));
  }
  Graph & g = ctx.graph;
  const Var x = apply_linear(ctx, recon_embed_, g.constant(masked_tokens)) +
                g.constant(temporal_encoding(agents, 0, Scene::kPastSteps, hyper_.d_model)) +
                latent_per_token(ctx, recon_latent_, z, agents, Scene::kPastSteps);
  const Var h = run_decoder(
    ctx, recon_decoder_, x, masked_features, agents, Scene::kPastSteps, Scene::kPastSteps, false);
  return apply_linear(ctx, recon_out_, h);
}

PredictionSet Model::sample_predictions(
  const data::Scene & scene, std::size_t k, Rng & rng, double sigma_scale) const
{
  if (k == 0) throw std::invalid_argument("sample_predictions: K must be >= 1");
  const auto [normalized, transform] = data::normalize_scene(scene, 0.0);
  const std::size_t n = scene.agents();

  Graph g;
  g.set_grad_enabled(false);
  ForwardContext ctx{g, Mode::inference, nullptr};
  const Var features = encode(ctx, past_tokens(normalized), n);
  const Gaussian prior = prior_params(ctx, features, n);
  const Tensor feature_values = features.value();
  const Tensor mu = prior.mu.value();
  const Tensor sigma = prior.sigma.value();
  Tensor last(n, 2);
  for (std::size_t a = 0; a < n; ++a) {
    last(a, 0) = static_cast<Scalar>(normalized.at(a, Scene::kPastSteps - 1).x);
    last(a, 1) = static_cast<Scalar>(normalized.at(a, Scene::kPastSteps - 1).y);
  }

  PredictionSet out(k, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t s = 0; s < k; ++s) {
    Tensor z = mu;
    if (s > 0) {
      for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] += static_cast<Scalar>(sigma_scale * static_cast<double>(sigma[i]) * normal(rng));
      }
    }
    Graph gs;
    gs.set_grad_enabled(false);
    ForwardContext sctx{gs, Mode::inference, nullptr};
    const Var pred = decode_future_autoregressive(sctx, gs.constant(feature_values), gs.constant(std::move(z)), last, n);
    const Tensor & p = pred.value();
    for (std::size_t t = 0; t < Scene::kFutureSteps; ++t) {
      for (std::size_t a = 0; a < n; ++a) {
        out.at(s, a, t) = transform.invert(
          data::Vec2{static_cast<double>(p(t * n + a, 0)), static_cast<double>(p(t * n + a, 1))});
      }
    }
  }
  return out;
}

}  // namespace socrec::model
