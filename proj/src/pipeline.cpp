#include "swintrack/pipeline.hpp"

#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

TrainedModel train_model(const RunConfig& config, PairSource& source,
                         const std::function<void(const StepLog&)>& on_step) {
  config.validate();
  TrainedModel out;
  out.model = std::make_unique<SwinTrackModel>(config.model, config.train.seed);
  Trainer trainer(*out.model, config.train);
  out.log = trainer.run(source, on_step);
  return out;
}

TrainedModel train_model(const RunConfig& config, const std::function<void(const StepLog&)>& on_step) {
  const std::unique_ptr<PairSource> source = make_pair_source(config);
  return train_model(config, *source, on_step);
}

nlohmann::json checkpoint_manifest(const RunConfig& config) {
  return {{"format_version", kCheckpointFormatVersion}, {"config", to_json(config)}};
}

void save_model(const std::filesystem::path& path, const RunConfig& config, const SwinTrackModel& model) {
  save_checkpoint(path, checkpoint_manifest(config), model.parameters());
}

LoadedModel load_model(const std::filesystem::path& path) {
  const Checkpoint ckpt = read_checkpoint(path);
  if (!ckpt.manifest.contains("config")) {
    throw std::runtime_error(path.string() + ": checkpoint manifest has no config");
  }
  LoadedModel out;
  out.config = run_config_from_json(ckpt.manifest.at("config"));
  out.model = std::make_unique<SwinTrackModel>(out.config.model, out.config.train.seed);
  load_parameters(ckpt, out.model->parameters());
  return out;
}

namespace {

double suc_of(const SwinTrackModel& model, const std::vector<SyntheticScene>& scenes,
              const TrackerConfig& track, double* pre) {
  const MetricReport r = evaluate_scenes(model, scenes, track);
  if (pre != nullptr) *pre = r.pre;
  return r.suc;
}

}  // namespace

std::pair<AblationRow, AblationRow> run_ablation(const RunConfig& base, const std::string& axis,
                                                 const std::function<void(const std::string&)>& progress) {
  base.validate();
  RunConfig a = base, b = base;
  std::string label_a, label_b;
  if (axis == "fusion") {
    a.model.fusion_mode = FusionMode::kConcat;
    b.model.fusion_mode = FusionMode::kCross;
    label_a = "fusion=concat";
    label_b = "fusion=cross";
  } else if (axis == "pe") {
    a.model.pe_mode = PeMode::kUntied;
    b.model.pe_mode = PeMode::kSine;
    label_a = "pe=untied";
    label_b = "pe=sine";
  } else if (axis == "loss") {
    a.model.loss.mode = LossMode::kVarifocal;
    b.model.loss.mode = LossMode::kBce;
    label_a = "loss=varifocal";
    label_b = "loss=bce";
  } else if (axis == "aug") {
    a.train.aug = AugMode::kStrong;
    b.train.aug = AugMode::kWeak;
    label_a = "aug=strong";
    label_b = "aug=weak";
  } else if (axis == "hann") {
    label_a = "gamma=" + std::to_string(base.track.gamma);
    label_b = "gamma=0";
  } else {
    throw std::invalid_argument("unknown ablation axis '" + axis + "'");
  }

  const std::vector<SyntheticScene> scenes = evaluation_scenes(base.data);
  const auto note = [&](const std::string& s) {
    if (progress) progress(s);
  };
  AblationRow row_a{label_a}, row_b{label_b};

  note("training " + label_a);
  const TrainedModel model_a = train_model(a);
  row_a.parameters = count_parameters(*model_a.model);
  row_a.suc = suc_of(*model_a.model, scenes, a.track, &row_a.pre);

  if (axis == "hann") {
    TrackerConfig no_window = base.track;
    no_window.gamma = 0.0;
    row_b.parameters = row_a.parameters;
    row_b.suc = suc_of(*model_a.model, scenes, no_window, &row_b.pre);
    return {row_a, row_b};
  }
  note("training " + label_b);
  const TrainedModel model_b = train_model(b);
  row_b.parameters = count_parameters(*model_b.model);
  row_b.suc = suc_of(*model_b.model, scenes, b.track, &row_b.pre);
  return {row_a, row_b};
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
