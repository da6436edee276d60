#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "swintrack/parameter.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// File layout, all integers little-endian:
//   "SWTRCKPT"                     8-byte magic
//   u32 format_version
//   u64 manifest_length, manifest  JSON text (format version, model config, ...)
//   u64 entry_count
//   entry_count x { u32 name_length, name,
//                   u32 rank, rank x u64 extent,
//                   numel x f32 payload }
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct CheckpointEntry {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  nlohmann::json manifest;
  std::vector<CheckpointEntry> entries;
};

void save_checkpoint(const std::filesystem::path& path, const nlohmann::json& manifest,
                     const ParameterSet& params);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Copies entries into `params`. Names and shapes must match one-to-one;
// any mismatch throws std::runtime_error describing it.
void load_parameters(const Checkpoint& checkpoint, ParameterSet& params);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
