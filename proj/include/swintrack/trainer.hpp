#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "swintrack/model.hpp"
#include "swintrack/optim.hpp"
#include "swintrack/synth.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Supplies training pairs. Implementations draw all randomness from `rng`.
class PairSource {
 public:
  virtual ~PairSource() = default;
  virtual TrainingPair next(Rng& rng) = 0;
};

// Pairs cut from seeded synthetic scenes, frames rendered on demand.
class SyntheticPairSource : public PairSource {
 public:
  SyntheticPairSource(const SynthConfig& base, std::size_t sequences, std::uint64_t first_seed,
                      AugMode aug, PairGeometry geometry, std::size_t max_gap = 30);
  TrainingPair next(Rng& rng) override;

 private:
  std::vector<SyntheticScene> scenes_;
  AugMode aug_;
  PairGeometry geometry_;
  std::size_t max_gap_;
};

class SequencePairSource : public PairSource {
 public:
  SequencePairSource(std::vector<Sequence> sequences, AugMode aug, PairGeometry geometry,
                     std::size_t max_gap = 30);
  TrainingPair next(Rng& rng) override;

 private:
  std::vector<Sequence> sequences_;
  AugMode aug_;
  PairGeometry geometry_;
  std::size_t max_gap_;
};

// Always returns the same pair.
class FixedPairSource : public PairSource {
 public:
  explicit FixedPairSource(TrainingPair pair) : pair_(std::move(pair)) {}
  TrainingPair next(Rng&) override { return pair_; }

 private:
  TrainingPair pair_;
};

PairGeometry pair_geometry(const ModelConfig& model, const TrackerConfig& track);

// Training source described by a run configuration: on-disk sequences when
// data.train_dirs is set, synthetic scenes otherwise.
std::unique_ptr<PairSource> make_pair_source(const RunConfig& config);

struct StepLog {
  std::size_t step = 0;
  double cls_loss = 0.0;
  double reg_loss = 0.0;
  double total = 0.0;
  double lr = 0.0;
};

class Trainer {
 public:
  Trainer(SwinTrackModel& model, const TrainConfig& config);

  // One optimiser step over `config.batch` pairs. Throws std::runtime_error
  // when the loss is not finite.
  StepLog step(PairSource& source);
  // Runs the remaining steps of the schedule.
  std::vector<StepLog> run(PairSource& source, const std::function<void(const StepLog&)>& on_step = {});

  std::size_t steps_done() const { return step_; }
  AdamW& optimizer() { return optimizer_; }

 private:
  SwinTrackModel& model_;
  TrainConfig config_;
  AdamW optimizer_;
  LrSchedule schedule_;
  Rng rng_;
  std::size_t step_ = 0;
};

void write_loss_log(const std::filesystem::path& path, const std::vector<StepLog>& log);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
