#include "edict/bigint.hpp"

#include <algorithm>
#include <stdexcept>

#include "edict/errors.hpp"

namespace edict {

namespace {
using u64 = std::uint64_t;
using u128 = unsigned __int128;
}  // namespace

BigUint::BigUint(u64 v) {
  if (v != 0) {
    limbs_.push_back(v);
  }
}

BigUint BigUint::from_decimal(const std::string& digits) {
  if (digits.empty()) {
    throw Error("from_decimal: empty string");
  }
  BigUint out;
  for (char c : digits) {
    if (c < '0' || c > '9') {
      throw Error("from_decimal: non-digit character");
    }
    out.mul_word(10).add_word(static_cast<u64>(c - '0'));
  }
  return out;
}

void BigUint::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) {
    limbs_.pop_back();
  }
}

int BigUint::compare(const BigUint& other) const {
  if (limbs_.size() != other.limbs_.size()) {
    return limbs_.size() < other.limbs_.size() ? -1 : 1;
  }
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    if (limbs_[i] != other.limbs_[i]) {
      return limbs_[i] < other.limbs_[i] ? -1 : 1;
    }
  }
  return 0;
}

BigUint& BigUint::add(const BigUint& other) {
  const std::size_t n = std::max(limbs_.size(), other.limbs_.size());
  limbs_.resize(n, 0);
  u64 carry = 0;
  for (std::size_t i = 0; i < n; ++i) {
    u128 sum = static_cast<u128>(limbs_[i]) + carry;
    if (i < other.limbs_.size()) {
      sum += other.limbs_[i];
    }
    limbs_[i] = static_cast<u64>(sum);
    carry = static_cast<u64>(sum >> 64);
  }
  if (carry != 0) {
    limbs_.push_back(carry);
  }
  return *this;
}

BigUint& BigUint::sub(const BigUint& other) {
  if (compare(other) < 0) {
    throw Error("BigUint::sub would underflow");
  }
  u64 borrow = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    u128 rhs = borrow;
    if (i < other.limbs_.size()) {
      rhs += other.limbs_[i];
    }
    u128 lhs = limbs_[i];
    if (lhs >= rhs) {
      limbs_[i] = static_cast<u64>(lhs - rhs);
      borrow = 0;
    } else {
      limbs_[i] = static_cast<u64>((lhs + (static_cast<u128>(1) << 64)) - rhs);
      borrow = 1;
    }
  }
  trim();
  return *this;
}

BigUint& BigUint::mul_word(u64 w) {
  if (w == 0 || limbs_.empty()) {
    limbs_.clear();
    return *this;
  }
  u64 carry = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    u128 prod = static_cast<u128>(limbs_[i]) * w + carry;
    limbs_[i] = static_cast<u64>(prod);
    carry = static_cast<u64>(prod >> 64);
  }
  if (carry != 0) {
    limbs_.push_back(carry);
  }
  return *this;
}

BigUint& BigUint::add_word(u64 w) {
  u64 carry = w;
  for (std::size_t i = 0; carry != 0 && i < limbs_.size(); ++i) {
    u128 sum = static_cast<u128>(limbs_[i]) + carry;
    limbs_[i] = static_cast<u64>(sum);
    carry = static_cast<u64>(sum >> 64);
  }
  if (carry != 0) {
    limbs_.push_back(carry);
  }
  return *this;
}

BigUint& BigUint::sub_word(u64 w) {
  return sub(BigUint(w));
}

std::string BigUint::to_decimal() const {
  if (limbs_.empty()) {
    return "0";
  }
  std::vector<u64> work(limbs_.rbegin(), limbs_.rend());
  std::string out;
  while (!work.empty()) {
    u64 rem = 0;
    std::vector<u64> next;
    next.reserve(work.size());
    for (u64 limb : work) {
      u128 cur = (static_cast<u128>(rem) << 64) | limb;
      u64 q = static_cast<u64>(cur / 10);
      rem = static_cast<u64>(cur % 10);
      if (!next.empty() || q != 0) {
        next.push_back(q);
      }
    }
    out.push_back(static_cast<char>('0' + rem));
    work = std::move(next);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace edict
