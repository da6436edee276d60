#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "swintrack/checkpoint.hpp"
#include "swintrack/evaluate.hpp"
#include "swintrack/trainer.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

struct TrainedModel {
  std::unique_ptr<SwinTrackModel> model;
  std::vector<StepLog> log;
};

// Builds the model from config.model seeded with config.train.seed and runs
// the full schedule on the configured pair source.
TrainedModel train_model(const RunConfig& config, const std::function<void(const StepLog&)>& on_step = {});
TrainedModel train_model(const RunConfig& config, PairSource& source,
                         const std::function<void(const StepLog&)>& on_step = {});

// Manifest stored in checkpoints: format version plus the resolved config.
nlohmann::json checkpoint_manifest(const RunConfig& config);
void save_model(const std::filesystem::path& path, const RunConfig& config, const SwinTrackModel& model);

struct LoadedModel {
  RunConfig config;
  std::unique_ptr<SwinTrackModel> model;
};
// Rebuilds the model described by the checkpoint manifest and loads its
// weights. Throws when names or shapes disagree with that configuration.
LoadedModel load_model(const std::filesystem::path& path);

struct AblationRow {
  std::string label;
  std::size_t parameters = 0;
  double suc = 0.0;
  double pre = 0.0;
};

inline const std::vector<std::string>& ablation_axes() {
  static const std::vector<std::string> axes = {"fusion", "pe", "loss", "aug", "hann"};
  return axes;
}

// Two runs differing only along `axis`, evaluated on the same synthetic
// held-out scenes. The "hann" axis reuses one trained model and changes
// only the tracker's window weight. Throws std::invalid_argument for an
// unknown axis.
std::pair<AblationRow, AblationRow> run_ablation(const RunConfig& base, const std::string& axis,
                                                 const std::function<void(const std::string&)>& progress = {});

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
