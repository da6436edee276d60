#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "swintrack/tokens.hpp"

namespace swintrack {

// Raised for invalid or unknown configuration entries.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttentionConfig {
  std::size_t d_model = 32;
  std::size_t n_heads = 2;

  std::size_t d_head() const { return d_model / n_heads; }
  void validate() const {
    if (n_heads == 0 || d_model == 0 || d_model % n_heads != 0) {
      throw std::invalid_argument("d_model " + std::to_string(d_model) +
                                  " must be a positive multiple of n_heads " +
                                  std::to_string(n_heads));
    }
  }
};

enum class PeMode { kUntied, kSine };
enum class FusionMode { kConcat, kCross };
enum class LossMode { kVarifocal, kBce };
enum class AugMode { kStrong, kWeak };

struct FusionConfig {
  std::size_t blocks = 2;  // N
  std::size_t d_model = 32;
  std::size_t n_heads = 2;
  PeMode pe_mode = PeMode::kUntied;
  FusionMode fusion_mode = FusionMode::kConcat;

  AttentionConfig attention() const { return {d_model, n_heads}; }
  std::size_t ffn_hidden() const { return 4 * d_model; }
};

struct BackboneConfig {
  std::size_t stride = 16;
  std::size_t d_model = 32;
  std::size_t n_heads = 2;
  std::size_t depth = 1;
};

// Per-channel standardisation applied to [0, 1] crops before the backbone.
struct NormalizationConstants {
  std::array<float, 3> mean = {0.485f, 0.456f, 0.406f};
  std::array<float, 3> stddev = {0.229f, 0.224f, 0.225f};
};

struct LossConfig {
  LossMode mode = LossMode::kVarifocal;
  double vfl_alpha = 0.75;
  double vfl_gamma = 2.0;
  double cls_weight = 1.0;
  double reg_weight = 1.0;
};

struct ModelConfig {
  std::size_t d_model = 64;        // C
  std::size_t fusion_blocks = 2;   // N
  std::size_t n_heads = 2;
  std::size_t stride = 16;
  std::size_t template_size = 64;
  std::size_t search_size = 128;
  std::size_t backbone_depth = 1;
  PeMode pe_mode = PeMode::kUntied;
  FusionMode fusion_mode = FusionMode::kConcat;
  LossConfig loss;
  NormalizationConstants normalization;

  GridShape template_grid() const { return {template_size / stride, template_size / stride}; }
  GridShape search_grid() const { return {search_size / stride, search_size / stride}; }
  FusionConfig fusion() const { return {fusion_blocks, d_model, n_heads, pe_mode, fusion_mode}; }
  BackboneConfig backbone() const { return {stride, d_model, n_heads, backbone_depth}; }
  void validate() const;
};

struct TrainConfig {
  double lr = 3e-3;  // head / fusion learning rate
  double backbone_lr_multiplier = 0.1;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip = 1.0;
  std::size_t steps = 3000;
  std::size_t batch = 32;
  double warmup_frac = 0.1;
  double drop_frac = 0.7;
  std::uint64_t seed = 1;
  AugMode aug = AugMode::kStrong;
  void validate() const;
};

struct TrackerConfig {
  double gamma = 0.49;  // Hanning window weight
  double template_factor = 2.0;
  double search_factor = 4.0;
  void validate() const;
};

// Parameters of the synthetic moving-target renderer.
struct SynthConfig {
  std::size_t frame_width = 160;
  std::size_t frame_height = 160;
  std::size_t frames = 40;
  double target_min_size = 18.0;
  double target_max_size = 34.0;
  double max_speed = 4.0;            // initial speed bound, px per frame
  double random_walk_sigma = 0.6;    // velocity noise per frame
  std::size_t distractors = 2;
  double distractor_similarity = 0.0;  // 0: unrelated colours, 1: target colours
  double scale_jitter = 0.01;        // relative size drift per frame
  std::uint64_t seed = 0;
  void validate() const;
};

struct DataConfig {
  SynthConfig synth;
  std::size_t train_sequences = 4096;
  std::size_t eval_sequences = 20;
  std::uint64_t train_seed = 1000;
  std::uint64_t eval_seed = 9000;
  // Optional on-disk sequences used for training instead of synthetic ones.
  std::vector<std::string> train_dirs;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  TrackerConfig track;
  DataConfig data;
  void validate() const;
};

// Serialisation. Parsing rejects unknown keys; absent keys keep defaults.
nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const TrackerConfig& c);
nlohmann::json to_json(const SynthConfig& c);
nlohmann::json to_json(const DataConfig& c);
nlohmann::json to_json(const RunConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
TrackerConfig tracker_config_from_json(const nlohmann::json& j);
SynthConfig synth_config_from_json(const nlohmann::json& j);
DataConfig data_config_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

std::string to_string(PeMode m);
std::string to_string(FusionMode m);
std::string to_string(LossMode m);
std::string to_string(AugMode m);

}  // namespace swintrack
