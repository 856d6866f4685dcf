#include "edict/order_encoding.hpp"

#include "edict/errors.hpp"

namespace edict {

void check_value(std::string_view s, std::size_t max_len) {
  if (s.size() > max_len) {
    throw LengthError("value of length " + std::to_string(s.size()) +
                      " exceeds the column maximum of " +
                      std::to_string(max_len));
  }
  for (unsigned char c : s) {
    if (c < kAlphabetLo || c > kAlphabetHi) {
      throw AlphabetError("byte 0x" + std::to_string(static_cast<int>(c)) +
                          " outside the printable ASCII alphabet");
    }
  }
}

BigUint encode(std::string_view s, std::size_t max_len) {
  check_value(s, max_len);
  BigUint acc;
  for (std::size_t i = 0; i < max_len; ++i) {
    std::uint64_t code =
        i < s.size() ? static_cast<unsigned char>(s[i]) - kAlphabetLo : 0;
    acc.mul_word(100).add_word(code);
  }
  return acc;
}

BigUint domain_max(std::size_t max_len) {
  BigUint acc;
  for (std::size_t i = 0; i < max_len; ++i) {
    acc.mul_word(100).add_word(kAlphabetHi - kAlphabetLo);
  }
  acc.add_word(1);
  return acc;
}

BigUint mod_shift(const BigUint& x, const BigUint& r, const BigUint& n) {
  if (x >= r) {
    BigUint out = x;
    out.sub(r);
    return out;
  }
  BigUint out = n;
  out.sub(r).add(x);
  return out;
}

}  // namespace edict
