// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>

#include "CLI11.hpp"
#include "acceptance_checks.hpp"
#include "swintrack/evaluate.hpp"
#include "swintrack/model_gradcheck.hpp"
#include "swintrack/pipeline.hpp"

using namespace swintrack;
using acceptance::Outcome;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr double kGradcheckSeconds = 300.0;
constexpr double kOverfitLoss = 0.05;
constexpr std::size_t kOverfitSteps = 500;
constexpr double kOverfitIou = 0.9;
constexpr double kOverfitSeconds = 600.0;
constexpr double kMinSuc = 0.60;
constexpr double kMinMarginOverStatic = 0.15;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void log(const std::string& s) { std::cerr << "  .. " << s << std::endl; }

Outcome gradient_correctness() {
  const GradcheckResult r = run_model_gradcheck(gradcheck_model_config(), 1);
  return {r.passed() && r.seconds < kGradcheckSeconds,
          fmt("max rel error %.2e over %.0f coordinates (< 1e-3), %.1f s (< 300 s)", r.max_rel_error,
              static_cast<double>(r.coordinates), r.seconds)};
}

RunConfig overfit_config() {
  RunConfig c;
  c.train.steps = kOverfitSteps;
  c.train.batch = 1;
  c.train.lr = 2e-3;
  c.train.weight_decay = 0.0;
  return c;
}

Outcome overfit_run() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = overfit_config();
  SynthConfig sc = cfg.data.synth;
  sc.seed = 4242;
  const SyntheticScene scene(sc);
  Rng rng(5);
  const TrainingPair pair = sample_training_pair(scene.render(0), scene.gt(0), scene.render(3), scene.gt(3),
                                                 AugMode::kStrong, rng, pair_geometry(cfg.model, cfg.track));
  FixedPairSource source(pair);
  const TrainedModel trained = train_model(cfg, source);
  std::size_t first_below = 0;
  double best = 1e9;
  for (const StepLog& s : trained.log) {
    best = std::min(best, s.total);
    if (first_below == 0 && s.total < kOverfitLoss) first_below = s.step + 1;
  }
  const ResponseMap r = trained.model->forward(pair.template_crop, pair.search_crop);
  const auto scores = r.cls.data();
  const std::size_t arg = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  const double overlap = iou(decode_all(r, cfg.model.stride)[arg], pair.gt_in_search);
  const double secs = seconds_since(t0);
  return {first_below > 0 && overlap > kOverfitIou && secs < kOverfitSeconds,
          fmt("loss < 0.05 first at step %.0f (best %.4f), argmax IoU %.3f (> 0.9), %.1f s", static_cast<double>(first_below),
              best, overlap, secs)};
}

struct TrackingRun {
  std::unique_ptr<SwinTrackModel> model;
  MetricReport report;
  double seconds = 0;
};

TrackingRun train_and_evaluate(const RunConfig& cfg, const std::vector<SyntheticScene>& scenes, const std::string& label) {
  const auto t0 = std::chrono::steady_clock::now();
  TrackingRun run;
  run.model = train_model(cfg, [&](const StepLog& s) {
                if ((s.step + 1) % 500 == 0)
                  log(label + fmt(" step %.0f loss %.4f", static_cast<double>(s.step + 1), s.total));
              }).model;
  run.report = evaluate_scenes(*run.model, scenes, cfg.track);
  run.seconds = seconds_since(t0);
  log(label + fmt(": SUC %.4f PRE %.4f (%.0f s)", run.report.suc, run.report.pre, run.seconds));
  return run;
}

Outcome determinism_and_persistence(const RunConfig& base, const fs::path& dir) {
  RunConfig c = base;
  c.train.steps = 40;
  c.train.batch = 2;
  const TrainedModel a = train_model(c), b = train_model(c);
  write_loss_log(dir / "run_a.loss.csv", a.log);
  write_loss_log(dir / "run_b.loss.csv", b.log);
  const bool logs_equal = slurp(dir / "run_a.loss.csv") == slurp(dir / "run_b.loss.csv");

  save_model(dir / "first.ckpt", c, *a.model);
  const LoadedModel loaded = load_model(dir / "first.ckpt");
  save_model(dir / "second.ckpt", loaded.config, *loaded.model);
  const std::string first = slurp(dir / "first.ckpt"), second = slurp(dir / "second.ckpt");
  const bool ckpt_equal = !first.empty() && first == second;
  return {logs_equal && ckpt_equal, std::string("loss logs ") + (logs_equal ? "identical" : "DIFFER") +
                                        " over 40 steps; checkpoint save->load->save " +
                                        (ckpt_equal ? "byte-identical" : "DIFFERS") +
                                        fmt(" (%.0f bytes)", static_cast<double>(first.size()))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string config_path;
  std::string out_dir = (fs::temp_directory_path() / "swintrack_acceptance").string();
  app.add_option("--config", config_path, "run config for the tracking criteria (defaults built in)");
  app.add_option("--out", out_dir, "directory for logs and checkpoints");
  CLI11_PARSE(app, argc, argv);

  RunConfig base;
  if (!config_path.empty()) base = load_run_config(config_path);
  base.validate();
  fs::create_directories(out_dir);

  int failures = 0;
  const auto report = [&](int id, const std::string& name, const Outcome& o) {
    std::printf("%s  %2d  %-32s %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  const auto guarded = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    try {
      report(id, name, f());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("threw: ") + e.what()});
    }
  };

  guarded(1, "gradient correctness", gradient_correctness);
  guarded(2, "permutation contract", acceptance::permutation_contract);
  guarded(3, "PE one-row reduction", acceptance::pe_one_row_reduction);
  guarded(4, "fusion bias oracle", acceptance::fusion_bias_oracle);
  guarded(5, "loss values", acceptance::loss_values);
  guarded(6, "overfit single pair", overfit_run);

  // 7 and 8 share the default-config model and the held-out scenes.
  std::vector<SyntheticScene> scenes;
  TrackingRun strong;
  MetricReport still;
  bool trained = false;
  try {
    scenes = evaluation_scenes(base.data);
    still = evaluate_static_baseline(scenes);
    strong = train_and_evaluate(base, scenes, "default (strong aug)");
    save_model(fs::path(out_dir) / "default.ckpt", base, *strong.model);
    trained = true;
  } catch (const std::exception& e) {
    report(7, "synthetic tracking", {false, std::string("threw: ") + e.what()});
  }
  if (trained) {
    report(7, "synthetic tracking",
           {strong.report.suc >= kMinSuc && strong.report.suc >= still.suc + kMinMarginOverStatic,
            fmt("SUC %.4f (>= 0.60), static SUC %.4f (margin %.4f >= 0.15), PRE %.4f", strong.report.suc, still.suc,
                strong.report.suc - still.suc, strong.report.pre)});
  }

  guarded(8, "ablation directions", [&]() -> Outcome {
    if (!trained) return {false, "default model unavailable"};
    ModelConfig cross_cfg = base.model;
    cross_cfg.fusion_mode = FusionMode::kCross;
    ModelConfig concat_cfg = base.model;
    concat_cfg.fusion_mode = FusionMode::kConcat;
    const std::size_t p_concat = count_parameters(SwinTrackModel(concat_cfg, 1));
    const std::size_t p_cross = count_parameters(SwinTrackModel(cross_cfg, 1));

    RunConfig weak = base;
    weak.train.aug = AugMode::kWeak;
    const TrackingRun weak_run = train_and_evaluate(weak, scenes, "weak aug");

    TrackerConfig no_hann = base.track;
    no_hann.gamma = 0.0;
    const MetricReport flat = evaluate_scenes(*strong.model, scenes, no_hann);

    const bool a = p_concat < p_cross;
    const bool b = weak_run.report.suc < strong.report.suc;
    const bool c = flat.suc <= strong.report.suc;
    return {a && b && c,
            fmt("(a) params %.0f < %.0f; ", static_cast<double>(p_concat), static_cast<double>(p_cross)) +
                fmt("(b) weak SUC %.4f < strong %.4f; ", weak_run.report.suc, strong.report.suc) +
                fmt("(c) gamma=0 SUC %.4f <= gamma=%.2f SUC %.4f", flat.suc, base.track.gamma, strong.report.suc)};
  });

  guarded(9, "metric oracle", acceptance::metric_oracle);
  guarded(10, "determinism and persistence", [&] { return determinism_and_persistence(base, out_dir); });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
