#include "edict/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cstring>
#include <memory>

#include "edict/errors.hpp"

namespace edict {

namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CtxPtr new_ctx() {
  CtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx) {
    throw Error("EVP_CIPHER_CTX_new failed");
  }
  return ctx;
}

void append_len_prefixed(std::string& out, std::string_view field) {
  std::uint32_t len = static_cast<std::uint32_t>(field.size());
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>(len >> (8 * i)));
  }
  out.append(field);
}

}  // namespace

MasterKey pae_gen(Rng& entropy) {
  MasterKey mk;
  entropy.fill(mk.bytes.data(), mk.bytes.size());
  return mk;
}

ColumnKey derive_key(const MasterKey& mk, std::string_view table_name,
                     std::string_view column_name) {
  std::string msg;
  msg.reserve(8 + table_name.size() + column_name.size());
  append_len_prefixed(msg, table_name);
  append_len_prefixed(msg, column_name);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  if (HMAC(EVP_sha256(), mk.bytes.data(), static_cast<int>(mk.bytes.size()),
           reinterpret_cast<const unsigned char*>(msg.data()), msg.size(),
           digest, &digest_len) == nullptr ||
      digest_len < 16) {
    throw Error("HMAC-SHA256 failed");
  }
  ColumnKey ck;
  std::memcpy(ck.bytes.data(), digest, ck.bytes.size());
  return ck;
}

EncryptedValue pae_enc(const ColumnKey& key,
                       const std::array<std::uint8_t, 12>& nonce,
                       std::string_view plaintext) {
  CtxPtr ctx = new_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr,
                         key.bytes.data(), nonce.data()) != 1) {
    throw Error("AES-GCM encrypt init failed");
  }
  EncryptedValue out;
  out.nonce = nonce;
  out.body.resize(plaintext.size());
  int len = 0;
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.body.data(), &len,
                        reinterpret_cast<const unsigned char*>(plaintext.data()),
                        static_cast<int>(plaintext.size())) != 1) {
    throw Error("AES-GCM encrypt failed");
  }
  int final_len = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.body.data() + len, &final_len) != 1 ||
      len + final_len != static_cast<int>(plaintext.size())) {
    throw Error("AES-GCM encrypt finalization failed");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG,
                          static_cast<int>(out.tag.size()),
                          out.tag.data()) != 1) {
    throw Error("AES-GCM tag extraction failed");
  }
  return out;
}

EncryptedValue pae_enc(const ColumnKey& key, Rng& rng,
                       std::string_view plaintext) {
  std::array<std::uint8_t, 12> nonce;
  rng.fill(nonce.data(), nonce.size());
  return pae_enc(key, nonce, plaintext);
}

std::string pae_dec(const ColumnKey& key, const EncryptedValue& c) {
  CtxPtr ctx = new_ctx();
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr,
                         key.bytes.data(), c.nonce.data()) != 1) {
    throw Error("AES-GCM decrypt init failed");
  }
  std::string out(c.body.size(), '\0');
  int len = 0;
  if (!c.body.empty() &&
      EVP_DecryptUpdate(ctx.get(),
                        reinterpret_cast<unsigned char*>(out.data()), &len,
                        c.body.data(), static_cast<int>(c.body.size())) != 1) {
    throw AuthError("ciphertext rejected");
  }
  // The tag buffer is const for verification purposes.
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG,
                          static_cast<int>(c.tag.size()),
                          const_cast<std::uint8_t*>(c.tag.data())) != 1) {
    throw Error("AES-GCM tag setup failed");
  }
  int final_len = 0;
  if (EVP_DecryptFinal_ex(ctx.get(),
                          reinterpret_cast<unsigned char*>(out.data()) + len,
                          &final_len) != 1) {
    throw AuthError("authentication failed: wrong key or tampered ciphertext");
  }
  out.resize(static_cast<std::size_t>(len + final_len));
  return out;
}

}  // namespace edict
