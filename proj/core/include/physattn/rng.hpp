#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace physattn {

/// Philox4x32-10 block function (Salmon et al., SC'11). Counter-based, so a
/// sample is a pure function of (key, counter) and streams never share state.
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                                      std::array<std::uint32_t, 2> key) noexcept;

/// Names a reproducible random stream: (seed, stream label) -> Philox key.
///
/// The key is splitmix64(seed XOR fnv1a64(label)). bits(i) is 64-bit word
/// i % 2 of the Philox block with counter words (lo(i/2), hi(i/2), 0, 0).
/// normal(i) applies Box-Muller to the two 53-bit uniforms of the block with
/// counter words (lo(i/2), hi(i/2), 1, 0), taking the cosine branch for even
/// i and the sine branch for odd i.
class RngHandle {
 public:
  explicit RngHandle(std::uint64_t seed, std::string stream = "root");

  /// Child handle for `label`; same seed, stream "parent/label".
  [[nodiscard]] RngHandle fork(std::string_view label) const;
  [[nodiscard]] RngHandle fork(std::uint64_t index) const;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::string& stream() const noexcept { return stream_; }

  [[nodiscard]] std::array<std::uint32_t, 4> block(std::uint64_t counter) const noexcept;
  [[nodiscard]] std::uint64_t bits(std::uint64_t index) const noexcept;
  /// Uniform on [0, 1) with 53 bits of resolution.
  [[nodiscard]] double uniform(std::uint64_t index) const noexcept;
  /// Standard normal.
  [[nodiscard]] double normal(std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_;
  std::string stream_;
  std::array<std::uint32_t, 2> key_;
};

/// Sequential cursor over a handle's samples. Not thread-safe; give each
/// worker its own forked handle.
class RngStream {
 public:
  explicit RngStream(RngHandle handle) : handle_(std::move(handle)) {}

  double next_uniform() noexcept { return handle_.uniform(uniform_index_++); }
  double next_normal() noexcept { return handle_.normal(normal_index_++); }
  std::uint64_t next_bits() noexcept { return handle_.bits(uniform_index_++); }

 private:
  RngHandle handle_;
  std::uint64_t uniform_index_ = 0;
  std::uint64_t normal_index_ = 0;
};

}  // namespace physattn
