#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "dalab/model.hpp"

namespace dalab {

/// Versioned JSON container holding a config object and named flat tensors.
/// Doubles are written in shortest round-trip form, so save → load is exact.
struct Container {
  static constexpr int kFormatVersion = 1;
  std::string kind;  // "model" or "router"
  nlohmann::json config;
  std::map<std::string, Tensor2D> tensors;
};

nlohmann::json to_json(const Container& c);
Container container_from_json(const nlohmann::json& j);
void save_container(const std::filesystem::path& path, const Container& c);
Container load_container(const std::filesystem::path& path);

nlohmann::json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig defaults = {});

Container to_container(const ToyTransformer& model);
ToyTransformer model_from_container(const Container& c);
void save_model(const std::filesystem::path& path, const ToyTransformer& model);
ToyTransformer load_model(const std::filesystem::path& path);

/// FNV-1a over the config and every parameter's bit pattern, as 16 hex digits.
std::string model_hash(const ToyTransformer& model);

/// FNV-1a 64 of a byte string, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace dalab
