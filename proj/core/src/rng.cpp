#include "edict/rng.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>

#include "edict/errors.hpp"

namespace edict {

namespace {
constexpr std::size_t kChunk = 4096;
}

Rng::Rng(std::uint64_t seed) {
  // Expand the 8-byte seed to a 256-bit ChaCha20 key.
  std::uint8_t seed_bytes[8];
  for (int i = 0; i < 8; ++i) {
    seed_bytes[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  }
  SHA256(seed_bytes, sizeof(seed_bytes), key_);
}

Rng Rng::from_os_entropy() {
  Rng r;
  if (RAND_bytes(r.key_, sizeof(r.key_)) != 1) {
    throw EntropyError("operating system entropy source failed");
  }
  return r;
}

void Rng::refill() {
  buffer_.assign(kChunk, 0);
  std::uint8_t iv[16] = {};
  // OpenSSL's ChaCha20 IV layout: 8-byte counter followed by 8-byte nonce.
  for (int i = 0; i < 8; ++i) {
    iv[i] = static_cast<std::uint8_t>(block_counter_ >> (8 * i));
  }
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr ||
      EVP_EncryptInit_ex(ctx, EVP_chacha20(), nullptr, key_, iv) != 1) {
    EVP_CIPHER_CTX_free(ctx);
    throw Error("chacha20 init failed");
  }
  int out_len = 0;
  if (EVP_EncryptUpdate(ctx, buffer_.data(), &out_len, buffer_.data(),
                        static_cast<int>(buffer_.size())) != 1 ||
      out_len != static_cast<int>(buffer_.size())) {
    EVP_CIPHER_CTX_free(ctx);
    throw Error("chacha20 keystream failed");
  }
  EVP_CIPHER_CTX_free(ctx);
  block_counter_ += kChunk / 64;
  pos_ = 0;
}

void Rng::fill(std::uint8_t* out, std::size_t len) {
  while (len > 0) {
    if (pos_ == buffer_.size()) {
      refill();
    }
    std::size_t n = std::min(len, buffer_.size() - pos_);
    std::memcpy(out, buffer_.data() + pos_, n);
    pos_ += n;
    out += n;
    len -= n;
  }
}

std::vector<std::uint8_t> Rng::bytes(std::size_t len) {
  std::vector<std::uint8_t> out(len);
  fill(out.data(), len);
  return out;
}

std::uint64_t Rng::next_u64() {
  std::uint8_t b[8];
  fill(b, sizeof(b));
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | b[i];
  }
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) {
    throw Error("uniform bound must be nonzero");
  }
  // Rejection sampling keeps the distribution exactly uniform.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) {
      return v % bound;
    }
  }
}

std::uint64_t Rng::uniform_in(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) {
    throw Error("uniform_in: empty interval");
  }
  return lo + uniform(hi - lo + 1);
}

}  // namespace edict
