#pragma once

#include <cstddef>
#include <string_view>

#include "edict/bigint.hpp"

namespace edict {

// Order-preserving map from bounded-length strings to unsigned integers.
//
// Each byte is mapped to a two-decimal-digit code (byte value minus 0x20,
// so 'A' = 33) and the codes are concatenated, right padded with "00" up to
// the column's fixed maximal length. Shorter strings therefore sort before
// their extensions, matching bytewise lexicographic order, and the rotated
// dictionary search can compare values modulo the domain size.
//
// The supported alphabet is printable ASCII, 0x20 through 0x7E.

inline constexpr unsigned char kAlphabetLo = 0x20;
inline constexpr unsigned char kAlphabetHi = 0x7E;

// Throws LengthError if |s| > max_len, AlphabetError on unsupported bytes.
BigUint encode(std::string_view s, std::size_t max_len);

// One past the largest encoding of any legal string of length <= max_len,
// so reductions modulo this value never collide at the maximum.
BigUint domain_max(std::size_t max_len);

// (x - r) mod n for x, r < n. The anchor shift used by rotated search.
BigUint mod_shift(const BigUint& x, const BigUint& r, const BigUint& n);

// Validity check without constructing the integer.
void check_value(std::string_view s, std::size_t max_len);

}  // namespace edict
