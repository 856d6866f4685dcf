#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "edict/rng.hpp"
#include "edict/types.hpp"

namespace edict {

// 128-bit database master key.
struct MasterKey {
  std::array<std::uint8_t, 16> bytes{};

  bool operator==(const MasterKey&) const = default;
};

// Per-column key derived from the master key and the column's names.
struct ColumnKey {
  std::array<std::uint8_t, 16> bytes{};

  bool operator==(const ColumnKey&) const = default;
};

// Fresh uniformly random master key.
MasterKey pae_gen(Rng& entropy);

// Deterministic, domain-separated derivation: HMAC-SHA256 over the
// length-prefixed table and column names, truncated to 16 bytes.
ColumnKey derive_key(const MasterKey& mk, std::string_view table_name,
                     std::string_view column_name);

// AES-128-GCM with a 12-byte nonce and 16-byte tag; no associated data.
// Callers must never reuse a nonce under one key.
EncryptedValue pae_enc(const ColumnKey& key,
                       const std::array<std::uint8_t, 12>& nonce,
                       std::string_view plaintext);

// Convenience wrapper drawing a fresh random nonce.
EncryptedValue pae_enc(const ColumnKey& key, Rng& rng,
                       std::string_view plaintext);

// Throws AuthError when the tag does not verify.
std::string pae_dec(const ColumnKey& key, const EncryptedValue& c);

}  // namespace edict
