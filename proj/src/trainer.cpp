#include "swintrack/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "swintrack/dataset.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace {

std::pair<std::size_t, std::size_t> pick_frames(std::size_t n, std::size_t max_gap, Rng& rng) {
  const std::size_t a = rng.index(n);
  const std::size_t lo = a > max_gap ? a - max_gap : 0;
  const std::size_t hi = std::min(n - 1, a + max_gap);
  return {a, lo + rng.index(hi - lo + 1)};
}

}  // namespace

SyntheticPairSource::SyntheticPairSource(const SynthConfig& base, std::size_t sequences,
                                         std::uint64_t first_seed, AugMode aug, PairGeometry geometry,
                                         std::size_t max_gap)
    : aug_(aug), geometry_(geometry), max_gap_(max_gap) {
  if (sequences == 0) throw std::invalid_argument("SyntheticPairSource: no sequences");
  for (std::size_t i = 0; i < sequences; ++i) {
    SynthConfig c = base;
    c.seed = first_seed + i;
    scenes_.emplace_back(c);
  }
}

TrainingPair SyntheticPairSource::next(Rng& rng) {
  const SyntheticScene& scene = scenes_[rng.index(scenes_.size())];
  const auto [a, b] = pick_frames(scene.size(), max_gap_, rng);
  return sample_training_pair(scene.render(a), scene.gt(a), scene.render(b), scene.gt(b), aug_, rng,
                              geometry_);
}

SequencePairSource::SequencePairSource(std::vector<Sequence> sequences, AugMode aug,
                                       PairGeometry geometry, std::size_t max_gap)
    : sequences_(std::move(sequences)), aug_(aug), geometry_(geometry), max_gap_(max_gap) {
  if (sequences_.empty()) throw std::invalid_argument("SequencePairSource: no sequences");
  for (const Sequence& s : sequences_) {
    if (s.size() == 0) throw std::invalid_argument("SequencePairSource: empty sequence " + s.name);
  }
}

TrainingPair SequencePairSource::next(Rng& rng) {
  return sample_training_pair(sequences_[rng.index(sequences_.size())], aug_, rng, geometry_, max_gap_);
}

PairGeometry pair_geometry(const ModelConfig& model, const TrackerConfig& track) {
  return {model.template_size, model.search_size, track.template_factor, track.search_factor};
}

std::unique_ptr<PairSource> make_pair_source(const RunConfig& config) {
  const PairGeometry geometry = pair_geometry(config.model, config.track);
  if (!config.data.train_dirs.empty()) {
    std::vector<Sequence> sequences;
    for (const std::string& dir : config.data.train_dirs) sequences.push_back(load_sequence_dir(dir));
    return std::make_unique<SequencePairSource>(std::move(sequences), config.train.aug, geometry);
  }
  return std::make_unique<SyntheticPairSource>(config.data.synth, config.data.train_sequences,
                                               config.data.train_seed, config.train.aug, geometry);
}

Trainer::Trainer(SwinTrackModel& model, const TrainConfig& config)
    : model_(model),
      config_(config),
      optimizer_(model.parameters(), {config.beta1, config.beta2, config.eps, config.weight_decay}),
      schedule_{config.lr, config.steps, config.warmup_frac, config.drop_frac, 0.1},
      rng_(config.seed ^ 0x5eedf00dULL) {
  config_.validate();
  optimizer_.set_lr_multiplier(model.parameters(), "backbone.", config.backbone_lr_multiplier);
}

StepLog Trainer::step(PairSource& source) {
  ParameterSet& params = model_.parameters();
  params.zero_grad();
  const ModelConfig& mc = model_.config();
  const Scalar inv_batch = static_cast<Scalar>(1.0 / static_cast<double>(config_.batch));

  StepLog log;
  log.step = step_;
  log.lr = schedule_.at(step_);
  for (std::size_t b = 0; b < config_.batch; ++b) {
    const TrainingPair pair = source.next(rng_);
    const ResponseMap response = model_.forward(pair.template_crop, pair.search_crop);
    const LossBreakdown loss = compute_loss(response, pair.gt_in_search, mc.stride, mc.loss);
    const double total = loss.total.item();
    if (!std::isfinite(total)) {
      throw std::runtime_error("non-finite loss at step " + std::to_string(step_) + " (cls " +
                               std::to_string(loss.cls) + ", reg " + std::to_string(loss.reg) + ")");
    }
    backward(scale(loss.total, inv_batch));
    log.cls_loss += loss.cls / static_cast<double>(config_.batch);
    log.reg_loss += loss.reg / static_cast<double>(config_.batch);
    log.total += total / static_cast<double>(config_.batch);
  }
  optimizer_.step(params, log.lr, config_.clip);
  ++step_;
  return log;
}

std::vector<StepLog> Trainer::run(PairSource& source, const std::function<void(const StepLog&)>& on_step) {
  std::vector<StepLog> log;
  while (step_ < config_.steps) {
    log.push_back(step(source));
    if (on_step) on_step(log.back());
  }
  return log;
}

void write_loss_log(const std::filesystem::path& path, const std::vector<StepLog>& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "step,cls_loss,reg_loss,total,lr\n" << std::setprecision(9);
  for (const StepLog& s : log) {
    out << s.step << ',' << s.cls_loss << ',' << s.reg_loss << ',' << s.total << ',' << s.lr << '\n';
  }
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
