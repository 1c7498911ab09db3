#pragma once

#include <string>
#include <vector>

#include "dalab/model.hpp"
#include "dalab/rng.hpp"

namespace dalab {

// ---------------------------------------------------------------------------
// One-hidden-layer network f(x) = V·σ(p(x; θ)) under cross-entropy
// ---------------------------------------------------------------------------

struct Eq1Network {
  Tensor2D V;      // d_out × d_ff
  FfnKind sigma_kind = FfnKind::ReLU;
  Tensor2D theta;  // d_in × d_ff, gate
  Tensor2D tau;    // d_in × d_ff, up; SwiGLU only
  Vector x;        // d_in
  Vector y;        // d_out, a distribution

  /// p = x·θ.
  Vector pre() const;
  /// ReLU: relu(p). SwiGLU: swish(p) ⊙ (x·τ).
  Vector activation() const;
  void validate() const;
};

/// ∂CE(V·a, y)/∂a_{i*} at the network's activations a:
/// ⟨softmax(V·a), v_{i*}⟩ − ⟨y, v_{i*}⟩. Requires p_{i*} > 0.
double grad_wrt_p(const Eq1Network& net, Eigen::Index i_star);

/// CE(V·a, y) as a function of the activation vector, the oracle for grad_wrt_p.
double network_loss_at(const Eq1Network& net, const Vector& activation);

enum class SignCall { Positive, Negative, Inconclusive };
std::string to_string(SignCall s);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  SignCall sign = SignCall::Inconclusive;  // at 3 standard errors
};

struct MCDims {
  Eigen::Index d_in = 16;
  Eigen::Index d_ff = 64;
  Eigen::Index d_out = 32;
};

struct MCOptions {
  MCDims dims;
  /// V entries ~ N(0, v_scale²); 0 means 1/sqrt(d_ff).
  double v_scale = 0.0;
  /// Redraw x, y, θ, τ with every sample instead of once per run.
  bool resample_inputs = false;
};

/// The shared draw of x, y, θ, τ and i* for a seed. x ~ U(0, 1), θ and τ ~
/// U[0, 2/d_in), y is normalized uniform noise independent of V, and i* is
/// the largest pre-activation. V is left empty.
Eq1Network draw_network_inputs(FfnKind kind, const MCDims& dims, Rng& rng);

/// Per-sample gradients for samples [begin, end). Sample s uses its own
/// stream of the seed, so any partition of [0, n) yields the same values.
struct MCPartial {
  std::size_t begin = 0;
  std::vector<double> values;
};
MCPartial sample_grad_block(FfnKind kind, std::size_t begin, std::size_t end, std::uint64_t seed,
                            const MCOptions& options = {});

/// Merges contiguous partials covering [0, n) in sample order.
MCEstimate merge_estimate(std::vector<MCPartial> partials);

/// Monte Carlo estimate of E[grad_wrt_p] over fresh zero-mean V.
MCEstimate expected_grad_sign(FfnKind kind, std::size_t n_samples, std::uint64_t seed, const MCOptions& options = {});

// ---------------------------------------------------------------------------
// Simplified loss and weight importance
// ---------------------------------------------------------------------------

/// ‖Jx·dx + Jθ·dθ‖².
double simplified_loss(const Tensor2D& jx, const Vector& dx, const Tensor2D& jtheta, const Vector& dtheta);

/// 2·Jθᵀ·(Jx·dx + Jθ·dθ).
Vector loss_grad_wrt_dtheta(const Tensor2D& jx, const Vector& dx, const Tensor2D& jtheta, const Vector& dtheta);

struct GradientSum {
  Vector total;
  Vector current;     // the last step
  Vector historical;  // all earlier steps, summed in order
};

/// Running sum in input order.
GradientSum gradient_sum(const std::vector<Vector>& per_step_grads);

struct ImportanceState {
  Tensor2D theta;
  std::size_t step = 0;

  static ImportanceState zeros(Eigen::Index rows, Eigen::Index cols);
};

/// Θ_i = Θ_{i−1} + |V| ⊙ |∇L_i|.
ImportanceState importance_update(const ImportanceState& state, const Tensor2D& v_magnitudes, const Tensor2D& grad);

/// Σ_i |V| ⊙ |∇L_i| from zero, in order.
Tensor2D importance_batch(const Tensor2D& v_magnitudes, const std::vector<Tensor2D>& grads);

/// Gradient of one sequence's summed next-token loss with respect to the last
/// layer's down-projection (d_ff × d_model).
Tensor2D final_down_grad(const ToyTransformer& model, const TokenSeq& tokens);

/// Spearman correlation with average ranks for ties; 0 if either side is constant.
double spearman(const Vector& a, const Vector& b);
double pearson(const Vector& a, const Vector& b);

struct ImportanceTrack {
  double mean_rank_correlation = 0.0;  // increment_i vs Θ_{i−1}, averaged over i ≥ 1
  double weight_correlation = 0.0;     // Pearson(Θ_final, |V|)
  std::size_t steps = 0;
};

struct ImportanceDivergence {
  ImportanceTrack relu;
  ImportanceTrack swiglu;
  bool relu_exceeds_swiglu = false;
};

/// Each corpus sequence is one step on the last down-projection.
ImportanceTrack importance_track(const ToyTransformer& model, const Corpus& corpus);
ImportanceDivergence importance_divergence(const ToyTransformer& model_relu, const ToyTransformer& model_swiglu,
                                           const Corpus& corpus);

}  // namespace dalab
