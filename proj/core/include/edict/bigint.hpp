#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edict {

// Arbitrary-precision unsigned integer, just large enough for the
// order-preserving string encoding: compare, add, subtract, multiply and
// divide by machine words. Limbs are 64-bit, least significant first.
class BigUint {
 public:
  BigUint() = default;
  explicit BigUint(std::uint64_t v);

  static BigUint from_decimal(const std::string& digits);

  int compare(const BigUint& other) const;
  bool operator==(const BigUint& other) const { return compare(other) == 0; }
  bool operator!=(const BigUint& other) const { return compare(other) != 0; }
  bool operator<(const BigUint& other) const { return compare(other) < 0; }
  bool operator<=(const BigUint& other) const { return compare(other) <= 0; }
  bool operator>(const BigUint& other) const { return compare(other) > 0; }
  bool operator>=(const BigUint& other) const { return compare(other) >= 0; }

  BigUint& add(const BigUint& other);
  // Requires *this >= other.
  BigUint& sub(const BigUint& other);
  BigUint& mul_word(std::uint64_t w);
  BigUint& add_word(std::uint64_t w);
  // Requires *this >= w.
  BigUint& sub_word(std::uint64_t w);

  bool is_zero() const { return limbs_.empty(); }
  std::string to_decimal() const;

 private:
  void trim();

  std::vector<std::uint64_t> limbs_;
};

}  // namespace edict
