#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "physattn/types.hpp"

namespace physattn::io {

/// On-disk container shared by feature sequences, masks and saliency grids.
///
/// JSON: {"T":int,"H":int,"W":int,"d":int,"data":[flat floats]}.
/// Binary: four little-endian uint32 (T, H, W, d) followed by T*H*W*d
/// little-endian IEEE-754 binary64 values. Data order is frame-major, then
/// row-major spatial, then channel. Masks use d = 1 with values 0.0 / 1.0.
struct Container {
  std::uint32_t frames = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::vector<double> data;

  friend bool operator==(const Container&, const Container&) = default;
};

enum class Format { json, binary };

inline constexpr std::size_t kBinaryHeaderBytes = 16;

/// 1-based line and column of a byte offset into text.
[[nodiscard]] std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

[[nodiscard]] Container parse_json(std::string_view text);
[[nodiscard]] std::string to_json(const Container& c);

[[nodiscard]] Container parse_binary(std::span<const std::byte> bytes);
[[nodiscard]] std::vector<std::byte> to_binary(const Container& c);

/// JSON when the first non-whitespace byte is '{', binary otherwise.
[[nodiscard]] Format detect_format(std::span<const std::byte> bytes) noexcept;

[[nodiscard]] Container read_container(const std::filesystem::path& path);
void write_container(const std::filesystem::path& path, const Container& c, Format format);

[[nodiscard]] std::vector<std::byte> read_file(const std::filesystem::path& path);
/// Write to a sibling temporary file, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

[[nodiscard]] Container to_container(const FeatureSequence& features);
[[nodiscard]] Container to_container(const MaskSequence& masks);
[[nodiscard]] FeatureSequence to_features(const Container& c);
/// Requires d = 1 and strictly binary data.
[[nodiscard]] MaskSequence to_masks(const Container& c);

/// Container-level counterpart of physattn::validate_pair: checks frame count,
/// height, width, mask depth, mask binarity and feature finiteness.
void validate_pair(const Container& features, const Container& masks);

}  // namespace physattn::io
