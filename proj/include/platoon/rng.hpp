#pragma once

// Seeded random streams. Every stream is derived from a master seed plus a
// tuple of coordinates, so a run's draws depend only on (seed, coordinates)
// and never on scheduling order.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace platoon {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hash of (master, c0, c1, ...), order-sensitive.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

/// Domain tags keep profile phases and delivery draws in separate streams.
enum class StreamTag : std::uint64_t { profile = 1, delivery = 2 };

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double on [0, 1) from the top 53 bits of one engine output.
  /// Defined bit-for-bit, unlike std::uniform_real_distribution.
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace platoon
