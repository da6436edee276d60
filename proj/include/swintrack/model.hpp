#pragma once

#include <cstdint>

#include "swintrack/backbone.hpp"
#include "swintrack/heads.hpp"
#include "swintrack/losses.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Backbone, transformer fusion and prediction head behind one parameter set.
// Parameter names are prefixed "backbone.", "fusion." and "head.".
class SwinTrackModel {
 public:
  SwinTrackModel(const ModelConfig& config, std::uint64_t seed);
  SwinTrackModel(const SwinTrackModel&) = delete;
  SwinTrackModel& operator=(const SwinTrackModel&) = delete;

  // Standardises a [0, 1] crop and runs the backbone on it.
  TokenSet embed(const Image& crop, SourceKind source) const;
  ResponseMap forward(const TokenSet& z, const TokenSet& x, AttentionRecorder* recorder = nullptr) const;
  ResponseMap forward(const Image& template_crop, const Image& search_crop) const;

  const ModelConfig& config() const { return config_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }
  PatchEmbedBackbone& backbone() { return backbone_; }
  FeatureFusion& fusion() { return fusion_; }
  PredictionHead& head() { return head_; }

 private:
  ModelConfig config_;
  ParameterSet params_;
  Rng init_rng_;
  PatchEmbedBackbone backbone_;
  FeatureFusion fusion_;
  PredictionHead head_;
};

// Number of scalar weights; each parameter counted once.
std::size_t count_parameters(const ParameterSet& params);
inline std::size_t count_parameters(const SwinTrackModel& model) {
  return count_parameters(model.parameters());
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
