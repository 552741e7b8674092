#include "physattn/rng.hpp"

#include <cmath>
#include <numbers>

namespace physattn {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char ch : s) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

constexpr double to_unit(std::uint64_t word) noexcept {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

constexpr std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngHandle::RngHandle(std::uint64_t seed, std::string stream) : seed_(seed), stream_(std::move(stream)) {
  const std::uint64_t k = splitmix64(seed_ ^ fnv1a64(stream_));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

RngHandle RngHandle::fork(std::string_view label) const {
  std::string child = stream_;
  child += '/';
  child += label;
  return RngHandle(seed_, std::move(child));
}

RngHandle RngHandle::fork(std::uint64_t index) const { return fork(std::to_string(index)); }

std::array<std::uint32_t, 4> RngHandle::block(std::uint64_t counter) const noexcept {
  return philox4x32({static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32), 0, 0},
                    key_);
}

std::uint64_t RngHandle::bits(std::uint64_t index) const noexcept {
  const auto b = block(index / 2);
  return index % 2 == 0 ? join(b[0], b[1]) : join(b[2], b[3]);
}

double RngHandle::uniform(std::uint64_t index) const noexcept { return to_unit(bits(index)); }

double RngHandle::normal(std::uint64_t index) const noexcept {
  const std::uint64_t counter = index / 2;
  const auto b = philox4x32(
      {static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32), 1, 0}, key_);
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>((join(b[0], b[1]) >> 11) + 1) * 0x1.0p-53;
  const double u2 = to_unit(join(b[2], b[3]));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return index % 2 == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

}  // namespace physattn
