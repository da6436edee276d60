#include "swintrack/model.hpp"

#include <unordered_set>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

SwinTrackModel::SwinTrackModel(const ModelConfig& config, std::uint64_t seed)
    : config_((config.validate(), config)),
      init_rng_(seed),
      backbone_(params_, "backbone", config_.backbone(), init_rng_),
      fusion_(params_, "fusion", config_.fusion(), config_.template_grid(), config_.search_grid(),
              init_rng_),
      head_(params_, "head", config_.d_model, init_rng_) {}

TokenSet SwinTrackModel::embed(const Image& crop, SourceKind source) const {
  return backbone_.extract(standardize(crop, config_.normalization), source);
}

ResponseMap SwinTrackModel::forward(const TokenSet& z, const TokenSet& x,
                                    AttentionRecorder* recorder) const {
  const auto [z_out, x_out] = fusion_.encode(z, x, recorder);
  const Tensor features = fusion_.decode(z_out, x_out, recorder);
  return head_.forward(features, x.tag.grid);
}

ResponseMap SwinTrackModel::forward(const Image& template_crop, const Image& search_crop) const {
  return forward(embed(template_crop, SourceKind::kTemplate), embed(search_crop, SourceKind::kSearch));
}

std::size_t count_parameters(const ParameterSet& params) {
  std::unordered_set<const void*> seen;
  std::size_t total = 0;
  for (const Parameter& p : params.items()) {
    if (seen.insert(p.tensor.node().get()).second) total += p.tensor.numel();
  }
  return total;
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
