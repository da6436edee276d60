#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "swintrack/dataset.hpp"
#include "swintrack/model_gradcheck.hpp"
#include "swintrack/pipeline.hpp"

namespace fs = std::filesystem;
using namespace swintrack;

namespace {

int cmd_train(const std::string& config_path, const std::string& out, std::string log_path) {
  const RunConfig config = load_run_config(config_path);
  if (log_path.empty()) log_path = out + ".loss.csv";
  const std::size_t every = std::max<std::size_t>(1, config.train.steps / 20);
  const TrainedModel trained = train_model(config, [&](const StepLog& s) {
    if (s.step % every == 0 || s.step + 1 == config.train.steps) {
      std::printf("step %5zu  cls %.4f  reg %.4f  total %.4f  lr %.2e\n", s.step, s.cls_loss, s.reg_loss,
                  s.total, s.lr);
      std::fflush(stdout);
    }
  });
  save_model(out, config, *trained.model);
  write_loss_log(log_path, trained.log);
  std::printf("wrote %s (%zu parameters) and %s\n", out.c_str(), count_parameters(*trained.model),
              log_path.c_str());
  return 0;
}

int cmd_track(const std::string& ckpt, const std::string& seq_dir, const std::string& out,
              const std::optional<double>& gamma, const std::string& dump_dir) {
  LoadedModel loaded = load_model(ckpt);
  TrackerConfig track = loaded.config.track;
  if (gamma) track.gamma = *gamma;
  const Sequence seq = load_sequence_dir(seq_dir);
  const std::vector<BBox> boxes = run_tracker(*loaded.model, seq, track, dump_dir);
  write_results(out, boxes);
  std::printf("tracked %zu frames of %s -> %s\n", boxes.size(), seq.name.c_str(), out.c_str());
  return 0;
}

int cmd_eval(const std::string& results, const std::string& seq_dir, const std::string& out) {
  std::ifstream gt_in(fs::path(seq_dir) / "groundtruth.txt");
  if (!gt_in) throw DatasetError("missing groundtruth.txt in " + seq_dir);
  const std::vector<BBox> gt = parse_groundtruth(gt_in);
  const std::vector<BBox> predicted = read_results(results);
  std::string name = fs::path(seq_dir).filename().string();
  if (name.empty()) name = fs::path(seq_dir).parent_path().filename().string();
  const MetricReport report = summarize({evaluate_sequence(name, predicted, gt)});
  std::ofstream(out) << report.to_json().dump(2) << '\n';
  std::cout << report.table();
  return 0;
}

int cmd_gradcheck(const std::string& config_path) {
  ModelConfig model = gradcheck_model_config();
  if (!config_path.empty()) model = load_run_config(config_path).model;
  const GradcheckResult r = run_model_gradcheck(model, 7);
  std::printf("%-22s %6s %8s %12s  %s\n", "group", "params", "coords", "max_rel_err", "worst");
  for (const GradcheckGroup& g : r.groups) {
    std::printf("%-22s %6zu %8zu %12.3e  %s\n", g.name.c_str(), g.parameters, g.coordinates, g.max_rel_error,
                g.worst_parameter.c_str());
  }
  std::printf("max relative error %.3e over %zu coordinates in %.1f s: %s\n", r.max_rel_error, r.coordinates,
              r.seconds, r.passed() ? "PASS" : "FAIL");
  return r.passed() ? 0 : 1;
}

int cmd_ablate(const std::string& axis, const std::string& config_path) {
  const RunConfig config = load_run_config(config_path);
  const auto [a, b] = run_ablation(config, axis, [](const std::string& s) {
    std::printf("%s\n", s.c_str());
    std::fflush(stdout);
  });
  std::printf("\n%-20s %10s %8s %8s\n", "variant", "params", "SUC", "PRE");
  for (const AblationRow& r : {a, b}) {
    std::printf("%-20s %10zu %8.4f %8.4f\n", r.label.c_str(), r.parameters, r.suc, r.pre);
  }
  std::printf("%-20s %10lld %+8.4f %+8.4f\n", "delta (2nd - 1st)",
              static_cast<long long>(b.parameters) - static_cast<long long>(a.parameters), b.suc - a.suc,
              b.pre - a.pre);
  return 0;
}

int cmd_config(const std::string& config_path) {
  const RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
  std::cout << to_json(config).dump(2) << '\n';
  return 0;
}

int cmd_generate(const std::string& config_path, const std::string& out, bool train_split) {
  const RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
  const std::size_t count = train_split ? config.data.train_sequences : config.data.eval_sequences;
  const std::uint64_t seed = train_split ? config.data.train_seed : config.data.eval_seed;
  for (std::size_t i = 0; i < count; ++i) {
    SynthConfig c = config.data.synth;
    c.seed = seed + i;
    const Sequence seq = generate_sequence(c);
    save_sequence_dir(seq, fs::path(out) / seq.name);
  }
  std::printf("wrote %zu sequences under %s\n", count, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transformer-based single-object tracker (desk-scale)"};
  app.require_subcommand(1);

  std::string config_path, out, ckpt, seq_dir, results, log_path, dump_dir, axis;
  std::optional<double> gamma;
  bool train_split = false;

  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint plus loss log");
  train->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Checkpoint path")->required();
  train->add_option("--log", log_path, "Loss log CSV (default: <out>.loss.csv)");

  auto* track = app.add_subcommand("track", "Track a sequence directory");
  track->add_option("--ckpt", ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  track->add_option("--seq", seq_dir, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  track->add_option("--out", out, "Results file")->required();
  track->add_option("--gamma", gamma, "Hanning window weight")->check(CLI::Range(0.0, 1.0));
  track->add_option("--dump-attn", dump_dir, "Write attention maps of every frame here");

  auto* eval = app.add_subcommand("eval", "Score a results file against groundtruth");
  eval->add_option("--results", results, "Results file")->required()->check(CLI::ExistingFile);
  eval->add_option("--seq", seq_dir, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--out", out, "Report JSON")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the full model");
  gradcheck->add_option("--config", config_path, "Run configuration whose model section is checked")
      ->check(CLI::ExistingFile);

  auto* ablate = app.add_subcommand("ablate", "Train two configurations differing in one axis");
  ablate->add_option("--axis", axis, "Axis")->required()->check(CLI::IsMember(ablation_axes()));
  ablate->add_option("--config", config_path, "Base run configuration")->required()->check(CLI::ExistingFile);

  auto* generate = app.add_subcommand("generate", "Write synthetic sequences to disk");
  generate->add_option("--config", config_path, "Run configuration (data section)")->check(CLI::ExistingFile);
  generate->add_option("--out", out, "Output directory")->required();
  generate->add_flag("--train", train_split, "Generate the training split instead of the evaluation split");

  auto* show = app.add_subcommand("config", "Print a run configuration with every default filled in");
  show->add_option("--config", config_path, "Partial run configuration (JSON)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, out, log_path);
    if (*track) return cmd_track(ckpt, seq_dir, out, gamma, dump_dir);
    if (*eval) return cmd_eval(results, seq_dir, out);
    if (*gradcheck) return cmd_gradcheck(config_path);
    if (*ablate) return cmd_ablate(axis, config_path);
    if (*generate) return cmd_generate(config_path, out, train_split);
    if (*show) return cmd_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
