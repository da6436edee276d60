#pragma once

#include <cstddef>
#include <string_view>

#include "swintrack/tensor.hpp"

namespace swintrack {

struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// Which image a token came from.
enum class SourceKind : int { kTemplate = 1, kSearch = 2 };

std::string_view source_name(SourceKind kind);

struct SourceTag {
  SourceKind kind = SourceKind::kSearch;
  GridShape grid;

  std::size_t tokens() const { return grid.size(); }
};

inline std::string_view source_name(SourceKind kind) {
  return kind == SourceKind::kTemplate ? "template" : "search";
}

}  // namespace swintrack

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Feature tokens of one image, flattened row-major from `tag.grid`.
struct TokenSet {
  Tensor tokens;  // [grid.size(), d_model]
  SourceTag tag;
};

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
