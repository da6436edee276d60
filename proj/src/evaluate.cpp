#include "swintrack/evaluate.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace fs = std::filesystem;

namespace {

constexpr char kDumpMagic[8] = {'S', 'W', 'A', 'T', 'T', 'N', '0', '1'};

static_assert(std::endian::native == std::endian::little, "dump writer assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const fs::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw std::runtime_error(path.string() + ": truncated attention dump");
  }
  return v;
}

std::string scene_name(const SyntheticScene& scene) { return "synth-" + std::to_string(scene.config().seed); }

}  // namespace

void write_attention_dump(const fs::path& path, const AttentionRecorder& recorder) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kDumpMagic, sizeof kDumpMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(recorder.maps.size()));
  for (const auto& [label, map] : recorder.maps) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(label.size()));
    out.write(label.data(), static_cast<std::streamsize>(label.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(map.dim(0)));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(map.dim(1)));
    for (Scalar v : map.data()) put<float>(out, static_cast<float>(v));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<AttentionMap> read_attention_dump(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kDumpMagic, sizeof magic) != 0) {
    throw std::runtime_error(path.string() + ": not an attention dump");
  }
  std::vector<AttentionMap> maps(get<std::uint32_t>(in, path));
  for (AttentionMap& m : maps) {
    m.label.resize(get<std::uint32_t>(in, path));
    in.read(m.label.data(), static_cast<std::streamsize>(m.label.size()));
    m.rows = get<std::uint32_t>(in, path);
    m.cols = get<std::uint32_t>(in, path);
    m.values.resize(m.rows * m.cols);
    for (float& v : m.values) v = get<float>(in, path);
  }
  return maps;
}

std::vector<BBox> run_tracker(const SwinTrackModel& model, std::size_t frame_count,
                              const std::function<Image(std::size_t)>& frame, const BBox& init,
                              const TrackerConfig& config, const fs::path& dump_dir) {
  if (frame_count == 0) throw std::invalid_argument("run_tracker: no frames");
  if (!dump_dir.empty()) fs::create_directories(dump_dir);
  TrackState state = init_track(frame(0), init, model, config);
  std::vector<BBox> boxes{init};
  for (std::size_t f = 1; f < frame_count; ++f) {
    if (dump_dir.empty()) {
      boxes.push_back(track_step(state, frame(f), model).box);
      continue;
    }
    AttentionRecorder recorder;
    boxes.push_back(track_step(state, frame(f), model, &recorder).box);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.attn", f + 1);
    write_attention_dump(dump_dir / name, recorder);
  }
  return boxes;
}

std::vector<BBox> run_tracker(const SwinTrackModel& model, const Sequence& sequence,
                              const TrackerConfig& config, const fs::path& dump_dir) {
  if (sequence.size() == 0) throw std::invalid_argument("run_tracker: empty sequence " + sequence.name);
  return run_tracker(model, sequence.size(), [&](std::size_t f) { return sequence.frames[f]; },
                     sequence.gt.front(), config, dump_dir);
}

std::vector<SyntheticScene> evaluation_scenes(const DataConfig& data) {
  std::vector<SyntheticScene> scenes;
  for (std::size_t i = 0; i < data.eval_sequences; ++i) {
    SynthConfig c = data.synth;
    c.seed = data.eval_seed + i;
    scenes.emplace_back(c);
  }
  return scenes;
}

MetricReport evaluate_scenes(const SwinTrackModel& model, const std::vector<SyntheticScene>& scenes,
                             const TrackerConfig& config) {
  std::vector<SequenceMetrics> per_sequence;
  for (const SyntheticScene& scene : scenes) {
    std::vector<BBox> gt;
    for (std::size_t f = 0; f < scene.size(); ++f) gt.push_back(scene.gt(f));
    const std::vector<BBox> boxes =
        run_tracker(model, scene.size(), [&](std::size_t f) { return scene.render(f); }, gt.front(), config);
    per_sequence.push_back(evaluate_sequence(scene_name(scene), boxes, gt));
  }
  return summarize(std::move(per_sequence));
}

MetricReport evaluate_static_baseline(const std::vector<SyntheticScene>& scenes) {
  std::vector<SequenceMetrics> per_sequence;
  for (const SyntheticScene& scene : scenes) {
    std::vector<BBox> gt;
    for (std::size_t f = 0; f < scene.size(); ++f) gt.push_back(scene.gt(f));
    per_sequence.push_back(evaluate_sequence(scene_name(scene), static_box_baseline(gt), gt));
  }
  return summarize(std::move(per_sequence));
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
