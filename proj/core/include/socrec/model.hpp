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

#ifndef SOCREC__MODEL_HPP_
#define SOCREC__MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "socrec/data.hpp"
#include "socrec/nn/attention.hpp"
#include "socrec/nn/autodiff.hpp"
#include "socrec/nn/gaussian.hpp"
#include "socrec/prediction.hpp"
#include "socrec/random.hpp"

namespace socrec::model
{

using Scalar = float;
using Graph = nn::Graph<Scalar>;
using Var = nn::Var<Scalar>;
using Tensor = nn::Tensor<Scalar>;
using Gaussian = nn::GaussianVars<Scalar>;

/**
 * @brief Architecture and training hyperparameters.
 *
 * Defaults are the reference ETH settings; use preset() for the other
 * datasets.
 */
struct HyperParams
{
  std::size_t d_model = 128;
  std::size_t d_ff = 512;
  std::size_t d_latent = 32;
  std::size_t encoder_layers = 1;
  std::size_t decoder_layers = 1;
  std::size_t recon_decoder_layers = 1;
  std::size_t heads = 8;
  double dropout = 0.1;
  double mask_ratio = 30.0;  // percent of past cells zeroed for the reconstructor
  double epsilon = 0.1;      // social-loss threshold
  double difficulty_threshold = 0.5;
  int threshold_epoch = 10;  // warm-up epochs before the first refresh
  int interval_epochs = 10;  // epochs between refreshes
  double learning_rate = 1e-4;
  double gamma = 0.8;
  int step_size = 10;
  double w_forecast = 1.0;
  double w_recon = 1.0;
  double w_social = 1.0;

  /// eth, hotel, univ, zara1, zara2 or sdd.
  static HyperParams preset(std::string_view dataset);
  void validate() const;
  /// Architecture fields only; used to detect checkpoint/config mismatches.
  bool same_architecture(const HyperParams & other) const;

  friend bool operator==(const HyperParams &, const HyperParams &) = default;
};

enum class Mode { training, inference };

/// Per-forward settings. Dropout is active only in training mode with an rng.
struct ForwardContext
{
  Graph & graph;
  Mode mode = Mode::inference;
  Rng * dropout_rng = nullptr;
};

/// Encoder tokens for the unmasked past, rows t * N + agent: (x, y, 0).
Tensor past_tokens(const data::Scene & scene);
/// Encoder tokens for a masked past: (x, y, indicator).
Tensor past_tokens(const data::MaskedPast & masked);
/// Rows t * N + agent of the 12 future positions.
Tensor future_positions(const data::Scene & scene);
/// Rows t * N + agent of the 8 past positions.
Tensor past_positions(const data::Scene & scene);

/**
 * @brief Shared-encoder forecaster and reconstructor.
 *
 * One transformer encoder with agent-aware attention feeds both the CVAE
 * forecaster (CPN prior, PPDN posterior, forecasting decoder) and the
 * masked-past VAE reconstructor (RPDN posterior, reconstruction decoder).
 * The forecaster predicts per-step displacements that are accumulated from
 * the last observed position.
 */
class Model
{
public:
  Model(const HyperParams & hyper, std::uint64_t init_seed);

  const HyperParams & hyper() const { return hyper_; }
  nn::ParameterStore<Scalar> & parameters() { return params_; }
  const nn::ParameterStore<Scalar> & parameters() const { return params_; }

  /// Parameters used only by the reconstruction branch (RPDN + decoder).
  std::vector<std::size_t> reconstructor_only_parameters() const;

  int epoch() const { return epoch_; }
  void set_epoch(int e) { epoch_ = e; }

  /// (8N) x 3 tokens -> (8N) x d_model features.
  Var encode(ForwardContext & ctx, const Tensor & tokens, std::size_t agents) const;

  Gaussian prior_params(ForwardContext & ctx, Var features, std::size_t agents) const;
  /// Training only: throws ContractError in inference mode.
  Gaussian posterior_params_forecast(
    ForwardContext & ctx, Var features, const Tensor & future, std::size_t agents) const;
  Gaussian posterior_params_recon(ForwardContext & ctx, Var masked_features, std::size_t agents) const;

  /// Teacher-forced parallel decode of positions (12N x 2). Training only.
  Var decode_future_teacher(
    ForwardContext & ctx, Var features, Var z, const Tensor & last_observed,
    const Tensor & future, std::size_t agents) const;
  /// Twelve sequential steps feeding back each predicted position.
  Var decode_future_autoregressive(
    ForwardContext & ctx, Var features, Var z, const Tensor & last_observed,
    std::size_t agents) const;
  /// Full past reconstruction (8N x 2).
  Var decode_reconstruction(
    ForwardContext & ctx, Var masked_features, const Tensor & masked_tokens, Var z,
    std::size_t agents) const;

  /**
   * @brief Draws K futures for a scene, in the scene's own frame.
   *
   * Sample 0 decodes the prior mean; the others decode mu + sigma_scale *
   * sigma * noise. sigma_scale = 0 collapses every sample onto the mode.
   */
  PredictionSet sample_predictions(
    const data::Scene & scene, std::size_t k, Rng & rng, double sigma_scale = 1.0) const;

private:
  struct LinearIds
  {
    std::size_t weight, bias;
  };
  struct NormIds
  {
    std::size_t gain, bias;
  };
  struct AttentionIds
  {
    std::size_t query_self, query_other, key_self, key_other, value;
    LinearIds out;
  };
  struct EncoderLayerIds
  {
    AttentionIds attn;
    NormIds norm1;
    LinearIds ff1, ff2;
    NormIds norm2;
  };
  struct DecoderLayerIds
  {
    AttentionIds self_attn;
    NormIds norm1;
    AttentionIds cross_attn;
    NormIds norm2;
    LinearIds ff1, ff2;
    NormIds norm3;
  };
  struct CrossLayerIds
  {
    AttentionIds cross_attn;
    NormIds norm1;
    LinearIds ff1, ff2;
    NormIds norm2;
  };

  LinearIds make_linear(const std::string & name, std::size_t in, std::size_t out, Rng & rng);
  NormIds make_norm(const std::string & name);
  AttentionIds make_attention(const std::string & name, Rng & rng);
  EncoderLayerIds make_encoder_layer(const std::string & name, Rng & rng);
  DecoderLayerIds make_decoder_layer(const std::string & name, Rng & rng);

  Var param(ForwardContext & ctx, std::size_t id) const;
  Var apply_linear(ForwardContext & ctx, const LinearIds & ids, Var x) const;
  Var apply_norm(ForwardContext & ctx, const NormIds & ids, Var x) const;
  Var apply_attention(
    ForwardContext & ctx, const AttentionIds & ids, Var query, Var memory,
    const nn::AgentMask & mask, const Tensor * causal) const;
  Var apply_feed_forward(ForwardContext & ctx, const LinearIds & ff1, const LinearIds & ff2, Var x) const;
  Var apply_dropout(ForwardContext & ctx, Var x) const;
  Var run_decoder(
    ForwardContext & ctx, const std::vector<DecoderLayerIds> & layers, Var tokens, Var memory,
    std::size_t agents, std::size_t steps, std::size_t memory_steps, bool causal) const;
  Var latent_per_token(ForwardContext & ctx, const LinearIds & proj, Var z, std::size_t agents, std::size_t steps) const;
  Var future_decoder_tokens(ForwardContext & ctx, Var inputs, Var z_tokens, std::size_t agents) const;
  Gaussian gaussian_head(ForwardContext & ctx, const LinearIds & head, Var pooled) const;

  HyperParams hyper_;
  nn::ParameterStore<Scalar> params_;
  int epoch_ = 0;

  LinearIds input_embed_;
  std::vector<EncoderLayerIds> encoder_;
  LinearIds prior_head_;
  LinearIds ppdn_embed_;
  CrossLayerIds ppdn_layer_;
  LinearIds ppdn_head_;
  LinearIds recon_head_;
  LinearIds future_embed_;
  LinearIds future_latent_;
  std::vector<DecoderLayerIds> future_decoder_;
  LinearIds future_out_;
  LinearIds recon_embed_;
  LinearIds recon_latent_;
  std::vector<DecoderLayerIds> recon_decoder_;
  LinearIds recon_out_;
  std::size_t first_recon_only_ = 0;
};

/// Sinusoidal encoding of timestep t for a d-dimensional model.
Tensor temporal_encoding(std::size_t agents, std::size_t first_step, std::size_t steps, std::size_t d_model);

}  // namespace socrec::model

#endif  // SOCREC__MODEL_HPP_
