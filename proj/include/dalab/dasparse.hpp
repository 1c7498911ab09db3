#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dalab/checkpoint.hpp"
#include "dalab/model.hpp"

namespace dalab {

// ---------------------------------------------------------------------------
// Mask primitives
// ---------------------------------------------------------------------------

/// Threshold dynamic activation: neuron (layer, j) stays on for token t iff
/// |post| > threshold. One mask per token.
std::vector<NeuronMask> tda_mask(const ActivationTrace& trace, double threshold);

/// The k largest |values|; ties go to the lower index.
std::vector<bool> top_k_mask(const Vector& values, Eigen::Index k);

/// Token-level router-in-the-loop selection on one token's pre-activations.
std::vector<bool> rida_topk_token(const Vector& pre_activation, Eigen::Index k);

enum class Aggregator { SumOfMagnitudes, MaxOfMagnitudes, L2 };

std::string to_string(Aggregator a);
Aggregator parse_aggregator(std::string_view name);

/// Sequence-level selection: per layer, aggregate magnitudes over the prompt
/// tokens and keep the top k. The result is a static mask for generation.
NeuronMask rida_sequence(const ActivationTrace& prompt_trace, Eigen::Index k, Aggregator aggregator,
                         ActivationSource source = ActivationSource::Post);

/// Per-layer random mask with exactly k neurons on, for baselines.
NeuronMask random_mask(const ModelConfig& config, Eigen::Index k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Offline router (two-layer linear network per FFN layer)
// ---------------------------------------------------------------------------

struct RouterLayer {
  Tensor2D w1;  // d_model × hidden
  Vector b1;    // hidden
  Tensor2D w2;  // hidden × d_ff
  Vector b2;    // d_ff

  Vector scores(const Vector& hidden_state) const;
};

struct RouterModel {
  std::vector<RouterLayer> layers;
  double decision_threshold = 0.0;

  Eigen::Index hidden() const { return layers.empty() ? 0 : layers.front().w1.cols(); }
};

/// How activity labels are derived from |post_activation| for router training.
struct ActivityLabel {
  enum class Kind { Absolute, MatchedDensity };
  Kind kind = Kind::Absolute;
  double value = 0.0;  // absolute threshold, or target active fraction per layer

  static ActivityLabel absolute(double threshold) { return {Kind::Absolute, threshold}; }
  static ActivityLabel matched_density(double fraction) { return {Kind::MatchedDensity, fraction}; }
};

struct RouterTrainOptions {
  Eigen::Index hidden = 32;
  int epochs = 8;
  double lr = 0.01;
  ActivityLabel label = ActivityLabel::absolute(0.0);
  double holdout_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct RouterLayerMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double label_density = 0.0;      // fraction of held-out labels that are active
  double predicted_density = 0.0;  // fraction predicted active
  double activity_threshold = 0.0;
};

struct RouterFit {
  RouterModel router;
  std::vector<RouterLayerMetrics> heldout;

  double mean_recall() const;
};

/// Records (FFN input → activity label) pairs over the corpus, fits the router
/// per layer by per-neuron logistic regression with SGD, and scores the last
/// `holdout_fraction` of the samples.
RouterFit train_roda_router(const ToyTransformer& model, const Corpus& corpus, const RouterTrainOptions& options);

/// mask = score > decision threshold (strict).
std::vector<bool> roda_predict(const RouterModel& router, std::size_t layer, const Vector& hidden_state);

Container to_container(const RouterModel& router);
RouterModel router_from_container(const Container& c);

// ---------------------------------------------------------------------------
// Strategies and evaluation
// ---------------------------------------------------------------------------

struct DenseSpec {};
struct TdaSpec {
  double threshold = 0.0;
};
struct RodaSpec {
  RouterModel router;
};
struct TopKSpec {
  Eigen::Index k = 0;
  ActivationSource source = ActivationSource::Pre;
};
struct SequenceSpec {
  Eigen::Index k = 0;
  Aggregator aggregator = Aggregator::SumOfMagnitudes;
  ActivationSource source = ActivationSource::Post;
};
/// Static mask supplied by the caller (random baselines, ablations).
struct StaticMaskSpec {
  NeuronMask mask;
};

using StrategySpec = std::variant<DenseSpec, TdaSpec, RodaSpec, TopKSpec, SequenceSpec, StaticMaskSpec>;

std::string strategy_name(const StrategySpec& spec);
void validate(const StrategySpec& spec, const ModelConfig& config);

/// Each sequence is split into a prompt (processed densely) and a generation
/// phase in which the strategy's masks apply. Quality and density are measured
/// on generation-phase positions only, for every strategy including Dense.
struct EvalProtocol {
  double prompt_fraction = 0.5;

  Eigen::Index prompt_length(Eigen::Index sequence_length) const;
};

struct StrategyRun {
  double mean_ce = 0.0;
  std::vector<double> layer_density;
  std::size_t positions = 0;
};

/// Forward options that apply the strategy from position `prompt` on; earlier
/// positions run densely. `spec` must outlive the result.
ForwardOptions strategy_options(const ToyTransformer& model, const TokenSeq& seq, const StrategySpec& spec,
                                Eigen::Index prompt);

/// One sequence under the strategy and protocol.
ForwardResult strategy_forward(const ToyTransformer& model, const TokenSeq& seq, const StrategySpec& spec,
                               const EvalProtocol& protocol = {});

/// Runs one strategy over the corpus under the protocol.
StrategyRun run_strategy(const ToyTransformer& model, const Corpus& corpus, const StrategySpec& spec,
                         const EvalProtocol& protocol = {});

/// exp(mean CE) over generation-phase targets with the strategy applied.
double strategy_perplexity(const ToyTransformer& model, const Corpus& corpus, const StrategySpec& spec,
                           const EvalProtocol& protocol = {});

/// FFN multiply-accumulates per token for one layer.
double ffn_macs_per_token(const ModelConfig& config);
/// Attention multiply-accumulates per token at a given context length.
double attention_macs_per_token(const ModelConfig& config, Eigen::Index context);

/// Fraction of FFN multiply-accumulates skipped, weighted by per-layer FFN cost.
double flops_saved(const std::vector<double>& layer_density, const ModelConfig& config);

struct SparsityReport {
  std::string strategy;
  std::vector<double> layer_density;
  double density = 1.0;
  double flop_saved_fraction = 0.0;
  double attention_mac_share = 0.0;  // attention / (attention + FFN), dense, at mean context
  double perplexity_dense = 0.0;
  double perplexity_sparse = 0.0;
};

SparsityReport evaluate_strategy(const ToyTransformer& model, const Corpus& corpus, const StrategySpec& spec,
                                 const EvalProtocol& protocol = {});

/// |post| threshold at which TDA keeps `density` of generation-phase neurons.
double calibrate_tda_threshold(const ToyTransformer& model, const Corpus& corpus, double density,
                               const EvalProtocol& protocol = {});

/// Router decision threshold at which RODA keeps `density` of neurons.
double calibrate_router_threshold(const RouterModel& router, const ToyTransformer& model, const Corpus& corpus,
                                  double density, const EvalProtocol& protocol = {});

}  // namespace dalab
