#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "swintrack/metrics.hpp"
#include "swintrack/synth.hpp"
#include "swintrack/tracker.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Attention dump, one file per tracked frame, little-endian:
//   "SWATTN01", u32 map_count,
//   map_count x { u32 label_length, label, u32 rows, u32 cols, rows*cols x f32 }
struct AttentionMap {
  std::string label;
  std::size_t rows = 0, cols = 0;
  std::vector<float> values;
};

void write_attention_dump(const std::filesystem::path& path, const AttentionRecorder& recorder);
std::vector<AttentionMap> read_attention_dump(const std::filesystem::path& path);

// Tracks `frame_count` frames starting from `init` on frame 0. The first
// output box is `init` itself. With `dump_dir` set, attention maps of every
// later frame are written there as frame_NNNNN.attn.
std::vector<BBox> run_tracker(const SwinTrackModel& model, std::size_t frame_count,
                              const std::function<Image(std::size_t)>& frame, const BBox& init,
                              const TrackerConfig& config,
                              const std::filesystem::path& dump_dir = {});
std::vector<BBox> run_tracker(const SwinTrackModel& model, const Sequence& sequence,
                              const TrackerConfig& config,
                              const std::filesystem::path& dump_dir = {});

// Synthetic evaluation corpus: data.eval_sequences scenes seeded from data.eval_seed.
std::vector<SyntheticScene> evaluation_scenes(const DataConfig& data);

MetricReport evaluate_scenes(const SwinTrackModel& model, const std::vector<SyntheticScene>& scenes,
                             const TrackerConfig& config);
MetricReport evaluate_static_baseline(const std::vector<SyntheticScene>& scenes);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
