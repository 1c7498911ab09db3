#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dalab/model.hpp"
#include "dalab/rng.hpp"

namespace dalab {

using IndexSet = std::vector<Eigen::Index>;  // sorted, unique

// ---------------------------------------------------------------------------
// Heavy-hitter support analysis
// ---------------------------------------------------------------------------

struct SupportSet {
  IndexSet indices;
  double support_threshold = 0.0;

  bool contains(Eigen::Index i) const;
};

/// Indices whose weight is strictly above `support_threshold`.
SupportSet supp_tau(const Vector& weights, double support_threshold);

/// Intersection of the rows' supports: the largest heavy-hitter set S*
/// consistent with S* ⊆ supp(row) for every row. Rows may have different
/// lengths; an index a row does not cover is outside that row's support.
IndexSet estimate_h2(const std::vector<Vector>& rows, double support_threshold);

struct GoodMappingParams {
  IndexSet s_star;
  double alpha = 0.3;
  double support_threshold = 0.05;

  Eigen::Index k() const { return static_cast<Eigen::Index>(s_star.size()); }
  void validate() const;
};

struct RowCheck {
  bool contains_s_star = false;
  Eigen::Index excess = 0;  // |supp \ S*|
  bool excess_within_bound = false;
};

struct GoodMappingReport {
  std::vector<RowCheck> rows;
  Eigen::Index union_excess = 0;  // |∪ supp \ S*|
  double per_row_bound = 0.0;     // α·k
  double union_bound = 0.0;       // α·k·n
  bool union_within_bound = false;
  Eigen::Index containment_violations = 0;
  Eigen::Index excess_violations = 0;

  bool all_pass() const { return containment_violations == 0 && excess_violations == 0 && union_within_bound; }
};

/// Checks containment and both excess bounds; violations are report content.
GoodMappingReport verify_good_mapping(const std::vector<Vector>& rows, const GoodMappingParams& params);

/// Synthetic attention rows satisfying the (α, threshold, k) definition.
/// Mass 1 − margin goes to S* with every member above the threshold; the
/// margin goes to at most ⌊α·k⌋ random extra indices plus sub-threshold noise
/// on the rest.
class GoodMappingGenerator {
 public:
  GoodMappingGenerator(Eigen::Index width, GoodMappingParams params, std::uint64_t seed,
                       double min_margin = 0.05, double max_margin = 0.25);

  Vector sample();
  const GoodMappingParams& params() const { return params_; }

 private:
  Eigen::Index width_;
  GoodMappingParams params_;
  Rng rng_;
  double min_margin_, max_margin_;
  IndexSet others_;
};

// ---------------------------------------------------------------------------
// Activation patterns
// ---------------------------------------------------------------------------

enum class Normalization { PerTokenMax, PerNeuronMax, Global };
std::string to_string(Normalization n);
Normalization parse_normalization(std::string_view name);

/// |activation| of one layer (tokens × neurons), scaled into [0, 1].
/// All-zero rows/columns/matrices stay zero.
Tensor2D activation_heatmap(const ActivationTrace& trace, Eigen::Index layer, Normalization normalization,
                            ActivationSource source = ActivationSource::Post);

struct InertiaMetrics {
  double jaccard_mean = 0.0;  // consecutive-token overlap of top-q sets
  double jaccard_sd = 0.0;
  double concentration = 0.0;  // Gini of per-neuron top-set frequency
  double persistence = 0.0;    // tokens whose top set meets the first token's
  Eigen::Index top_size = 0;
};

/// Size of a top-q set over `width` neurons: ceil(q·width), at least 1.
Eigen::Index top_set_size(double q, Eigen::Index width);

InertiaMetrics inertia_metrics(const ActivationTrace& trace, Eigen::Index layer, double q);
InertiaMetrics inertia_metrics(const Tensor2D& activations, double q);
/// Pooled over independent segments: Jaccard and persistence stay within a
/// segment, concentration uses the frequencies summed over all of them.
InertiaMetrics inertia_metrics(const std::vector<Tensor2D>& segments, double q);

/// Gini coefficient of nonnegative values; 0 for an all-zero input.
double gini(const Vector& values);

struct Fig2Cell {
  std::string corpus;  // "sentence" or "random"
  InputMode mode = InputMode::Sequential;
  Tensor2D heatmap;
  InertiaMetrics metrics;
};

struct Fig2Options {
  double q = 0.05;
  Eigen::Index layer = -1;  // -1: last layer
  Normalization normalization = Normalization::PerTokenMax;
  ActivationSource source = ActivationSource::Post;
};

struct Fig2Report {
  std::array<Fig2Cell, 4> cells;  // sentence/parallel, sentence/sequential, random/parallel, random/sequential
  Eigen::Index lines = 0;
  Eigen::Index tokens_per_corpus = 0;
  Eigen::Index layer = 0;
  bool sequential_beats_parallel_sentence = false;  // (a)
  bool sequential_beats_parallel_random = false;    // (a)
  bool random_more_concentrated = false;            // (b)
  double sequential_gap = 0.0;                      // random-seq − sentence-seq concentration
  double parallel_gap = 0.0;                        // |sentence-par − random-par| concentration
  bool parallel_gap_smaller = false;                // (c)

  bool orderings_ab_hold() const {
    return sequential_beats_parallel_sentence && sequential_beats_parallel_random && random_more_concentrated;
  }
  const Fig2Cell& cell(const std::string& corpus, InputMode mode) const;
};

/// Runs {sentence, random} × {parallel, sequential} over paired lines. Each
/// pair is cut to a common length (at most max_seq) so that concentration is
/// comparable; heatmaps stack the lines' tokens in order.
Fig2Report fig2_experiment(const ToyTransformer& model, const Corpus& sentences, const Corpus& random_words,
                           const Fig2Options& options = {});

// ---------------------------------------------------------------------------
// First-heavy-hitter ablation
// ---------------------------------------------------------------------------

struct AblationReport {
  bool found = false;
  Eigen::Index position = -1;
  TokenId token = -1;
  double mean_received_attention = 0.0;
  InertiaMetrics before, after;
  double perplexity_before = 0.0;  // over targets present in both runs
  double perplexity_after = 0.0;
  Eigen::Index layer = 0;
};

/// Earliest position j that is in the support of every later attention row
/// (estimate_h2 over the rows that can see j); the sequence is re-run with
/// that token deleted.
std::optional<Eigen::Index> first_heavy_hitter(const Tensor2D& attention, double support_threshold);

AblationReport ablate_first_heavy_hitter(const ToyTransformer& model, const TokenSeq& sequence,
                                         double support_threshold, double q, Eigen::Index layer = -1);

}  // namespace dalab
