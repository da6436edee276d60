#include "swintrack/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'W', 'T', 'R', 'C', 'K', 'P', 'T'};

template <typename UInt>
void put_le(std::ostream& os, UInt value) {
  std::array<char, sizeof(UInt)> bytes;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  os.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& is) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw std::runtime_error("checkpoint truncated");
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) value |= static_cast<UInt>(bytes[i]) << (8 * i);
  return value;
}

std::string get_string(std::istream& is, std::size_t length) {
  std::string s(length, '\0');
  is.read(s.data(), static_cast<std::streamsize>(length));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const nlohmann::json& manifest,
                     const ParameterSet& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kCheckpointFormatVersion);
  const std::string text = manifest.dump();
  put_le<std::uint64_t>(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_le<std::uint64_t>(os, params.size());
  for (const Parameter& p : params.items()) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.tensor.rank()));
    for (std::size_t extent : p.tensor.shape()) put_le<std::uint64_t>(os, extent);
    for (Scalar v : p.tensor.data()) put_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!os) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error("not a checkpoint file: " + path.string());
  const auto version = get_le<std::uint32_t>(is);
  if (version != kCheckpointFormatVersion) {
    throw std::runtime_error("unsupported checkpoint format version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const auto manifest_length = get_le<std::uint64_t>(is);
  ckpt.manifest = nlohmann::json::parse(get_string(is, manifest_length));
  const auto count = get_le<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    CheckpointEntry entry;
    entry.name = get_string(is, get_le<std::uint32_t>(is));
    const auto rank = get_le<std::uint32_t>(is);
    for (std::uint32_t d = 0; d < rank; ++d) entry.shape.push_back(get_le<std::uint64_t>(is));
    entry.values.resize(shape_numel(entry.shape));
    for (float& v : entry.values) v = std::bit_cast<float>(get_le<std::uint32_t>(is));
    ckpt.entries.push_back(std::move(entry));
  }
  return ckpt;
}

void load_parameters(const Checkpoint& checkpoint, ParameterSet& params) {
  if (checkpoint.entries.size() != params.size()) {
    throw std::runtime_error("checkpoint holds " + std::to_string(checkpoint.entries.size()) +
                             " parameters, model expects " + std::to_string(params.size()));
  }
  for (const CheckpointEntry& entry : checkpoint.entries) {
    const Parameter* p = params.find(entry.name);
    if (p == nullptr) throw std::runtime_error("checkpoint parameter not in model: " + entry.name);
    if (p->tensor.shape() != entry.shape) {
      throw std::runtime_error("shape mismatch for " + entry.name + ": checkpoint " +
                               shape_string(entry.shape) + ", model " +
                               shape_string(p->tensor.shape()));
    }
  }
  for (const CheckpointEntry& entry : checkpoint.entries) {
    Tensor t = params.find(entry.name)->tensor;
    auto w = t.mutable_data();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<Scalar>(entry.values[k]);
  }
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
