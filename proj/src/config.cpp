#include "swintrack/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace swintrack {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::string_view section, std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(std::string(section) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& j, std::string_view section, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

template <typename Enum>
Enum parse_enum(const json& j, std::string_view section, const char* key, Enum fallback,
                std::initializer_list<std::pair<std::string_view, Enum>> names) {
  if (!j.contains(key)) return fallback;
  const std::string value = j.at(key).get<std::string>();
  for (const auto& [name, e] : names) {
    if (name == value) return e;
  }
  throw ConfigError(std::string(section) + "." + key + ": unknown value '" + value + "'");
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace

std::string to_string(PeMode m) { return m == PeMode::kUntied ? "untied" : "sine"; }
std::string to_string(FusionMode m) { return m == FusionMode::kConcat ? "concat" : "cross"; }
std::string to_string(LossMode m) { return m == LossMode::kVarifocal ? "varifocal" : "bce"; }
std::string to_string(AugMode m) { return m == AugMode::kStrong ? "strong" : "weak"; }

void ModelConfig::validate() const {
  require(d_model > 0 && n_heads > 0 && d_model % n_heads == 0,
          "model: d_model must be a positive multiple of n_heads");
  require(stride > 0, "model: stride must be positive");
  require(template_size > 0 && template_size % stride == 0,
          "model: template_size must be a positive multiple of stride");
  require(search_size > 0 && search_size % stride == 0,
          "model: search_size must be a positive multiple of stride");
  require(pe_mode != PeMode::kSine || d_model % 2 == 0, "model: sine encoding needs even d_model");
  require(d_model % 2 == 0, "model: backbone sine embedding needs even d_model");
  require(loss.vfl_alpha >= 0.0 && loss.vfl_gamma >= 0.0, "model: varifocal alpha/gamma must be >= 0");
  require(normalization.stddev[0] > 0 && normalization.stddev[1] > 0 && normalization.stddev[2] > 0,
          "model: normalisation stddev must be positive");
}

void TrainConfig::validate() const {
  require(lr > 0.0, "train: lr must be positive");
  require(backbone_lr_multiplier >= 0.0, "train: backbone_lr_multiplier must be >= 0");
  require(weight_decay >= 0.0, "train: weight_decay must be >= 0");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "train: betas must be in [0, 1)");
  require(eps > 0.0, "train: eps must be positive");
  require(steps > 0 && batch > 0, "train: steps and batch must be positive");
  require(warmup_frac >= 0.0 && warmup_frac <= 1.0, "train: warmup_frac must be in [0, 1]");
  require(drop_frac >= 0.0 && drop_frac <= 1.0, "train: drop_frac must be in [0, 1]");
}

void TrackerConfig::validate() const {
  require(gamma >= 0.0 && gamma <= 1.0, "track: gamma must be in [0, 1]");
  require(template_factor > 0.0 && search_factor > 0.0, "track: area factors must be positive");
}

void SynthConfig::validate() const {
  require(frames > 0, "synth: frames must be positive");
  require(target_min_size > 1.0 && target_min_size <= target_max_size,
          "synth: need 1 < target_min_size <= target_max_size");
  require(target_max_size * 1.5 < static_cast<double>(std::min(frame_width, frame_height)),
          "synth: target larger than frame");
  require(distractor_similarity >= 0.0 && distractor_similarity <= 1.0,
          "synth: distractor_similarity must be in [0, 1]");
  require(max_speed >= 0.0 && random_walk_sigma >= 0.0 && scale_jitter >= 0.0,
          "synth: motion parameters must be >= 0");
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  track.validate();
  data.synth.validate();
}

json to_json(const ModelConfig& c) {
  return json{{"d_model", c.d_model},
              {"fusion_blocks", c.fusion_blocks},
              {"n_heads", c.n_heads},
              {"stride", c.stride},
              {"template_size", c.template_size},
              {"search_size", c.search_size},
              {"backbone_depth", c.backbone_depth},
              {"pe_mode", to_string(c.pe_mode)},
              {"fusion_mode", to_string(c.fusion_mode)},
              {"loss_mode", to_string(c.loss.mode)},
              {"vfl_alpha", c.loss.vfl_alpha},
              {"vfl_gamma", c.loss.vfl_gamma},
              {"cls_weight", c.loss.cls_weight},
              {"reg_weight", c.loss.reg_weight},
              {"norm_mean", c.normalization.mean},
              {"norm_std", c.normalization.stddev}};
}

ModelConfig model_config_from_json(const json& j) {
  constexpr std::string_view s = "model";
  reject_unknown(j, s,
                 {"d_model", "fusion_blocks", "n_heads", "stride", "template_size", "search_size",
                  "backbone_depth", "pe_mode", "fusion_mode", "loss_mode", "vfl_alpha", "vfl_gamma",
                  "cls_weight", "reg_weight", "norm_mean", "norm_std"});
  ModelConfig c;
  read(j, s, "d_model", c.d_model);
  read(j, s, "fusion_blocks", c.fusion_blocks);
  read(j, s, "n_heads", c.n_heads);
  read(j, s, "stride", c.stride);
  read(j, s, "template_size", c.template_size);
  read(j, s, "search_size", c.search_size);
  read(j, s, "backbone_depth", c.backbone_depth);
  c.pe_mode = parse_enum(j, s, "pe_mode", c.pe_mode, {{"untied", PeMode::kUntied}, {"sine", PeMode::kSine}});
  c.fusion_mode = parse_enum(j, s, "fusion_mode", c.fusion_mode,
                             {{"concat", FusionMode::kConcat}, {"cross", FusionMode::kCross}});
  c.loss.mode = parse_enum(j, s, "loss_mode", c.loss.mode,
                           {{"varifocal", LossMode::kVarifocal}, {"bce", LossMode::kBce}});
  read(j, s, "vfl_alpha", c.loss.vfl_alpha);
  read(j, s, "vfl_gamma", c.loss.vfl_gamma);
  read(j, s, "cls_weight", c.loss.cls_weight);
  read(j, s, "reg_weight", c.loss.reg_weight);
  read(j, s, "norm_mean", c.normalization.mean);
  read(j, s, "norm_std", c.normalization.stddev);
  return c;
}

json to_json(const TrainConfig& c) {
  return json{{"lr", c.lr},
              {"backbone_lr_multiplier", c.backbone_lr_multiplier},
              {"weight_decay", c.weight_decay},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"eps", c.eps},
              {"clip", c.clip},
              {"steps", c.steps},
              {"batch", c.batch},
              {"warmup_frac", c.warmup_frac},
              {"drop_frac", c.drop_frac},
              {"seed", c.seed},
              {"aug", to_string(c.aug)}};
}

TrainConfig train_config_from_json(const json& j) {
  constexpr std::string_view s = "train";
  reject_unknown(j, s,
                 {"lr", "backbone_lr_multiplier", "weight_decay", "beta1", "beta2", "eps", "clip",
                  "steps", "batch", "warmup_frac", "drop_frac", "seed", "aug"});
  TrainConfig c;
  read(j, s, "lr", c.lr);
  read(j, s, "backbone_lr_multiplier", c.backbone_lr_multiplier);
  read(j, s, "weight_decay", c.weight_decay);
  read(j, s, "beta1", c.beta1);
  read(j, s, "beta2", c.beta2);
  read(j, s, "eps", c.eps);
  read(j, s, "clip", c.clip);
  read(j, s, "steps", c.steps);
  read(j, s, "batch", c.batch);
  read(j, s, "warmup_frac", c.warmup_frac);
  read(j, s, "drop_frac", c.drop_frac);
  read(j, s, "seed", c.seed);
  c.aug = parse_enum(j, s, "aug", c.aug, {{"strong", AugMode::kStrong}, {"weak", AugMode::kWeak}});
  return c;
}

json to_json(const TrackerConfig& c) {
  return json{{"gamma", c.gamma}, {"template_factor", c.template_factor}, {"search_factor", c.search_factor}};
}

TrackerConfig tracker_config_from_json(const json& j) {
  constexpr std::string_view s = "track";
  reject_unknown(j, s, {"gamma", "template_factor", "search_factor"});
  TrackerConfig c;
  read(j, s, "gamma", c.gamma);
  read(j, s, "template_factor", c.template_factor);
  read(j, s, "search_factor", c.search_factor);
  return c;
}

json to_json(const SynthConfig& c) {
  return json{{"frame_width", c.frame_width},
              {"frame_height", c.frame_height},
              {"frames", c.frames},
              {"target_min_size", c.target_min_size},
              {"target_max_size", c.target_max_size},
              {"max_speed", c.max_speed},
              {"random_walk_sigma", c.random_walk_sigma},
              {"distractors", c.distractors},
              {"distractor_similarity", c.distractor_similarity},
              {"scale_jitter", c.scale_jitter},
              {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& j) {
  constexpr std::string_view s = "synth";
  reject_unknown(j, s,
                 {"frame_width", "frame_height", "frames", "target_min_size", "target_max_size",
                  "max_speed", "random_walk_sigma", "distractors", "distractor_similarity",
                  "scale_jitter", "seed"});
  SynthConfig c;
  read(j, s, "frame_width", c.frame_width);
  read(j, s, "frame_height", c.frame_height);
  read(j, s, "frames", c.frames);
  read(j, s, "target_min_size", c.target_min_size);
  read(j, s, "target_max_size", c.target_max_size);
  read(j, s, "max_speed", c.max_speed);
  read(j, s, "random_walk_sigma", c.random_walk_sigma);
  read(j, s, "distractors", c.distractors);
  read(j, s, "distractor_similarity", c.distractor_similarity);
  read(j, s, "scale_jitter", c.scale_jitter);
  read(j, s, "seed", c.seed);
  return c;
}

json to_json(const DataConfig& c) {
  return json{{"synth", to_json(c.synth)},
              {"train_sequences", c.train_sequences},
              {"eval_sequences", c.eval_sequences},
              {"train_seed", c.train_seed},
              {"eval_seed", c.eval_seed},
              {"train_dirs", c.train_dirs}};
}

DataConfig data_config_from_json(const json& j) {
  constexpr std::string_view s = "data";
  reject_unknown(j, s, {"synth", "train_sequences", "eval_sequences", "train_seed", "eval_seed", "train_dirs"});
  DataConfig c;
  if (j.contains("synth")) c.synth = synth_config_from_json(j.at("synth"));
  read(j, s, "train_sequences", c.train_sequences);
  read(j, s, "eval_sequences", c.eval_sequences);
  read(j, s, "train_seed", c.train_seed);
  read(j, s, "eval_seed", c.eval_seed);
  read(j, s, "train_dirs", c.train_dirs);
  return c;
}

json to_json(const RunConfig& c) {
  return json{{"model", to_json(c.model)},
              {"train", to_json(c.train)},
              {"track", to_json(c.track)},
              {"data", to_json(c.data)}};
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j, "config", {"model", "train", "track", "data"});
  RunConfig c;
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
  if (j.contains("track")) c.track = tracker_config_from_json(j.at("track"));
  if (j.contains("data")) c.data = data_config_from_json(j.at("data"));
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace swintrack
