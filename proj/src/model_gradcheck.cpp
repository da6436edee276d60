#include "swintrack/model_gradcheck.hpp"

#include <chrono>
#include <map>

#include "swintrack/gradcheck.hpp"
#include "swintrack/model.hpp"
#include "swintrack/synth.hpp"

#if !defined(SWINTRACK_DOUBLE)
#error "model_gradcheck.cpp must be compiled against the 64-bit library"
#endif

namespace swintrack {

namespace {

// Identity forward; backward doubles the gradient and adds a constant.
Tensor faulty_identity(const Tensor& x) {
  Buffer v(x.data().begin(), x.data().end());
  return make_result(x.shape(), std::move(v), {x}, [](detail::Node& node) {
    auto& g = node.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2 * node.grad[i] + Scalar{0.01};
  });
}

}  // namespace

ModelConfig gradcheck_model_config() {
  ModelConfig c;
  c.d_model = 16;
  c.fusion_blocks = 2;
  c.n_heads = 2;
  c.stride = 16;
  c.template_size = 32;
  c.search_size = 64;
  c.backbone_depth = 1;
  c.pe_mode = PeMode::kUntied;
  c.fusion_mode = FusionMode::kConcat;
  c.loss.mode = LossMode::kVarifocal;
  return c;
}

std::string parameter_group(const std::string& name) {
  const auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
  if (starts("backbone.")) return "backbone";
  if (starts("fusion.encoder.pe.") || starts("fusion.decoder.pe.")) return "positional-encoding";
  if (starts("fusion.encoder.")) return "fusion.encoder";
  if (starts("fusion.decoder.")) return "fusion.decoder";
  if (starts("head.")) return "head";
  return "other";
}

GradcheckResult run_model_gradcheck(const ModelConfig& config, std::uint64_t seed, bool corrupt_backward) {
  const auto t0 = std::chrono::steady_clock::now();
  SwinTrackModel model(config, seed);

  SynthConfig synth;
  synth.seed = seed;
  const SyntheticScene scene(synth);
  Rng rng(seed);
  const PairGeometry geometry{config.template_size, config.search_size, 2.0, 4.0};
  const TrainingPair pair =
      sample_training_pair(scene.render(0), scene.gt(0), scene.render(5), scene.gt(5), AugMode::kStrong, rng, geometry);

  const TokenSet z_probe = model.embed(pair.template_crop, SourceKind::kTemplate);
  const ResponseMap probe =
      model.forward(z_probe, model.embed(pair.search_crop, SourceKind::kSearch));
  // Detached targets are fixed at the base point; the check covers the graph
  // that training differentiates.
  const LossTargets targets = prepare_targets(probe, pair.gt_in_search, config.stride, config.loss);

  const auto loss_fn = [&] {
    ResponseMap response = model.forward(pair.template_crop, pair.search_crop);
    if (corrupt_backward) response.cls = faulty_identity(response.cls);
    return compute_loss(response, targets, config.stride, config.loss).total;
  };
  const FdReport report = fd_check(loss_fn, model.parameters());

  std::map<std::string, GradcheckGroup> groups;
  GradcheckResult result;
  for (std::size_t i = 0; i < report.per_parameter.size(); ++i) {
    const ParameterGradError& e = report.per_parameter[i];
    const std::string group = parameter_group(e.name);
    GradcheckGroup& g = groups[group];
    g.name = group;
    ++g.parameters;
    g.coordinates += model.parameters().items()[i].tensor.numel();
    if (e.max_rel_error >= g.max_rel_error) {
      g.max_rel_error = e.max_rel_error;
      g.worst_parameter = e.name;
    }
  }
  for (auto& [name, g] : groups) {
    result.coordinates += g.coordinates;
    result.groups.push_back(g);
  }
  result.max_rel_error = report.max_rel_error;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace swintrack
