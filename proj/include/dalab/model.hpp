#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dalab/numerics.hpp"

namespace dalab {

enum class FfnKind { ReLU, SwiGLU };
enum class InputMode { Parallel, Sequential };
/// Which FFN quantity an analysis reads: gate pre-activation or activation.
enum class ActivationSource { Pre, Post };

std::string to_string(FfnKind kind);
FfnKind parse_ffn_kind(std::string_view name);
std::string to_string(InputMode mode);
InputMode parse_input_mode(std::string_view name);
std::string to_string(ActivationSource s);
ActivationSource parse_activation_source(std::string_view name);

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;
using Corpus = std::vector<TokenSeq>;

struct ModelConfig {
  Eigen::Index d_model = 64;
  Eigen::Index d_ff = 256;
  Eigen::Index n_heads = 4;
  Eigen::Index n_layers = 2;
  Eigen::Index vocab_size = 256;
  FfnKind ffn_kind = FfnKind::ReLU;
  Eigen::Index max_seq = 128;
  std::uint64_t seed = 0;

  Eigen::Index head_dim() const { return d_model / n_heads; }
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct LayerWeights {
  Tensor2D wq, wk, wv, wo;
  Tensor2D gate;  // d_model × d_ff
  Tensor2D up;    // d_model × d_ff; 0×0 for ReLU
  Tensor2D down;  // d_ff × d_model
};

/// Pre-norm causal transformer with learned absolute positions, a
/// parameter-free RMSNorm before attention, before the FFN and before the
/// unembedding, and logits scaled by 1/sqrt(d_model).
struct ToyTransformer {
  ModelConfig config;
  Tensor2D tok_emb;  // vocab × d_model
  Tensor2D pos_emb;  // max_seq × d_model
  std::vector<LayerWeights> layers;
  Tensor2D unembed;  // d_model × vocab

  /// Every parameter block in a fixed order; used by SGD, hashing and I/O.
  template <typename F>
  void for_each_tensor(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    visit(*this, f);
  }

  /// Same shapes, all zeros.
  ToyTransformer zeros_like() const;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    f(std::string("tok_emb"), self.tok_emb);
    f(std::string("pos_emb"), self.pos_emb);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      auto& w = self.layers[l];
      f(p + "wq", w.wq);
      f(p + "wk", w.wk);
      f(p + "wv", w.wv);
      f(p + "wo", w.wo);
      f(p + "gate", w.gate);
      f(p + "up", w.up);
      f(p + "down", w.down);
    }
    f(std::string("unembed"), self.unembed);
  }
};

/// Raw material for every analysis in the project, recorded per layer.
struct LayerTrace {
  Tensor2D ffn_input;  // tokens × d_model, normalized hidden state entering the FFN
  Tensor2D pre;        // tokens × d_ff, gate pre-activation
  Tensor2D post;       // tokens × d_ff, activation before masking
  Tensor2D attention;  // tokens × tokens, head-averaged causal attention rows
};

struct ActivationTrace {
  std::vector<LayerTrace> layers;
  Eigen::Index tokens() const { return layers.empty() ? 0 : layers.front().post.rows(); }
};

/// One boolean row of length d_ff per layer.
struct NeuronMask {
  std::vector<std::vector<bool>> layers;

  static NeuronMask filled(const ModelConfig& config, bool value);
  double layer_density(std::size_t layer) const;
  double density() const;
  void check_shape(const ModelConfig& config) const;
};

/// Decides, for one layer and one position, which neurons stay on. `keep`
/// arrives as all-true (or the static mask, when one is given).
using TokenMasker =
    std::function<void(std::size_t layer, Eigen::Index position, const LayerTrace& layer_trace, std::vector<bool>& keep)>;

struct ForwardOptions {
  InputMode mode = InputMode::Sequential;
  std::optional<NeuronMask> mask;  // applied to every position
  TokenMasker masker;              // optional per-position policy
};

struct ForwardResult {
  Tensor2D logits;  // tokens × vocab
  ActivationTrace trace;
  Tensor2D kept_fraction;  // n_layers × tokens, fraction of FFN neurons left on
};

ToyTransformer init_model(const ModelConfig& config);

ForwardResult forward(const ToyTransformer& model, const TokenSeq& tokens, const ForwardOptions& options = {});

/// Mean next-token cross-entropy over positions 0..T-2 and its gradient for
/// every parameter (dense forward only).
struct LossAndGrad {
  double loss = 0.0;
  ToyTransformer grad;
};
LossAndGrad loss_and_grad(const ToyTransformer& model, const TokenSeq& tokens);

/// Per-token quantities for the final FFN block, where no later token mixing
/// happens: the gradient of token t's own next-token loss with respect to the
/// final down-projection is outer(post_t, delta_t).
struct FinalFfnGrads {
  Tensor2D post;   // predicted positions × d_ff
  Tensor2D delta;  // predicted positions × d_model
};
FinalFfnGrads final_ffn_token_grads(const ToyTransformer& model, const TokenSeq& tokens);

struct TrainOptions {
  int steps = 500;
  double lr = 0.05;
  Eigen::Index window = 64;
  std::uint64_t seed = 0;
};

struct TrainLogEntry {
  int step;
  double loss;
};

/// Plain SGD on next-token cross-entropy over random windows of the corpus.
ToyTransformer train_toy(const ToyTransformer& model, const Corpus& corpus, const TrainOptions& options,
                         std::vector<TrainLogEntry>* log = nullptr);

/// Mean next-token cross-entropy over a corpus under the given forward options.
double mean_cross_entropy(const ToyTransformer& model, const Corpus& corpus, const ForwardOptions& options = {});

/// exp(mean next-token cross-entropy) under teacher forcing.
double perplexity(const ToyTransformer& model, const Corpus& corpus, const ForwardOptions& options = {});

/// Splits a long token stream into windows of at most `window` tokens
/// (windows shorter than 2 tokens are dropped).
Corpus chunk(const TokenSeq& stream, Eigen::Index window);

TokenSeq tokenize(std::string_view text);
std::string detokenize(const TokenSeq& tokens);

}  // namespace dalab
