#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace edict {

// Seedable deterministic random generator backed by a ChaCha20 keystream.
// Builds draw all randomness (bucket sizes, shuffles, rotation offsets,
// nonces) from one of these, so a fixed seed reproduces a build exactly.
class Rng {
 public:
  // Deterministic stream derived from the seed.
  explicit Rng(std::uint64_t seed);

  // Fresh stream keyed from operating system entropy.
  static Rng from_os_entropy();

  void fill(std::uint8_t* out, std::size_t len);
  std::vector<std::uint8_t> bytes(std::size_t len);

  std::uint64_t next_u64();

  // Uniform in [0, bound); bound must be nonzero. Unbiased via rejection.
  std::uint64_t uniform(std::uint64_t bound);

  // Uniform in [lo, hi], inclusive.
  std::uint64_t uniform_in(std::uint64_t lo, std::uint64_t hi);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  Rng() = default;

  void refill();

  std::uint8_t key_[32] = {};
  std::uint64_t block_counter_ = 0;
  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
};

}  // namespace edict
