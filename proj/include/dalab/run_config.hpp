#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dalab/dasparse.hpp"
#include "dalab/inertia.hpp"
#include "dalab/model.hpp"
#include "dalab/moyu.hpp"

namespace dalab {

/// Bad config, bad flag or missing input: the CLI exits with 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One strategy row of the sparsify sweep. `density` > 0 asks for TDA/RODA
/// thresholds calibrated to that density instead of a fixed value.
struct StrategyEntry {
  std::string kind;  // dense, tda, roda, topk, sequence, random
  double threshold = 0.0;
  double density = 0.0;
  Eigen::Index k = 0;
  ActivationSource source = ActivationSource::Pre;
  Aggregator aggregator = Aggregator::SumOfMagnitudes;
  std::uint64_t seed = 0;
};

struct RunConfig {
  static constexpr int kVersion = 1;

  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  Eigen::Index layer = -1;
  std::filesystem::path base_dir = ".";  // relative paths resolve against this

  ModelConfig model;
  std::filesystem::path train_corpus = "assets/train_corpus.txt";
  double heldout_fraction = 0.1;
  Eigen::Index window = 64;
  int train_steps = 500;
  double train_lr = 0.05;
  std::filesystem::path checkpoint = "out/model.json";

  double prompt_fraction = 0.5;
  RouterTrainOptions router;
  std::vector<StrategyEntry> strategies;
  int random_masks = 20;

  std::size_t n_samples = 100000;
  MCOptions mc;
  int fd_points = 100;
  int recursion_steps = 1000;
  double perturbation_scale = 1e-2;
  bool flip_sign = false;  // test hook: negates every sign call
  std::optional<std::filesystem::path> relu_checkpoint, swiglu_checkpoint;

  std::filesystem::path sentences = "assets/sentences.txt";
  std::filesystem::path random_words = "assets/random_words.txt";
  double q = 0.05;
  double support_threshold = 0.05;
  Normalization normalization = Normalization::PerTokenMax;
  ActivationSource activation = ActivationSource::Post;  // what the fig2 heatmaps show
  std::filesystem::path ablate_sequence = "assets/sentences.txt";
  std::size_t ablate_line = 0;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  void validate() const;
};

/// Strategy sweep used when the config lists none: dense, TDA and RODA
/// calibrated to 50% density, token and sequence top-k at d_ff/2, top-k at d_ff.
std::vector<StrategyEntry> default_strategies(const ModelConfig& model);

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
/// The effective config, with every field present. Paths are written as given.
nlohmann::json to_json(const RunConfig& c);

/// Reads a text file, failing with the path in the message.
std::string read_text(const std::filesystem::path& path);
/// Non-empty lines of a text file, tokenized.
Corpus read_lines(const std::filesystem::path& path);

/// The training corpus split into train and held-out windows.
struct CorpusSplit {
  Corpus train;
  Corpus heldout;
};
CorpusSplit load_corpus_split(const RunConfig& c);

}  // namespace dalab
