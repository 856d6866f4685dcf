#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "edict/crypto.hpp"
#include "edict/types.hpp"

namespace edict {

// Read handle through which the enclave pulls encrypted dictionary entries
// out of untrusted memory, one entry at a time. Every load is counted; the
// counter is how tests pin the access complexity of each search.
class UntrustedLoader {
 public:
  explicit UntrustedLoader(std::span<const EncryptedValue> dict)
      : dict_(dict) {}

  const EncryptedValue& load(std::size_t index) {
    ++loads_;
    return dict_[index];
  }

  std::size_t size() const { return dict_.size(); }
  std::uint64_t load_count() const { return loads_; }

 private:
  std::span<const EncryptedValue> dict_;
  std::uint64_t loads_ = 0;
};

// Token payload layout: one tag byte, then the value right-padded with NUL
// bytes to the column maximum, so every filter shape encrypts to the same
// length.
inline constexpr std::uint8_t kTagNegInf = 0x00;
inline constexpr std::uint8_t kTagInclusive = 0x01;
inline constexpr std::uint8_t kTagExclusive = 0x02;
inline constexpr std::uint8_t kTagPosInf = 0x03;

// Both endpoints of a range filter, individually encrypted under the
// column key with independent nonces.
struct EncryptedRangeToken {
  EncryptedValue lo;
  EncryptedValue hi;
};

struct VidRange {
  ValueId lo = kDummyVid;
  ValueId hi = kDummyVid;

  bool is_dummy() const { return lo == kDummyVid; }
  bool operator==(const VidRange&) const = default;
};

// Dictionary search result: two contiguous ValueId ranges (sorted and
// rotated dictionaries, dummy-filled when one suffices) or an explicit
// ascending list (unsorted dictionaries).
class VidSelection {
 public:
  static VidSelection ranges(VidRange first, VidRange second = VidRange{}) {
    VidSelection s;
    s.is_ranges_ = true;
    s.first_ = first;
    s.second_ = second;
    return s;
  }

  static VidSelection none() { return ranges(VidRange{}, VidRange{}); }

  static VidSelection list(std::vector<ValueId> vids) {
    VidSelection s;
    s.is_ranges_ = false;
    s.vids_ = std::move(vids);
    return s;
  }

  bool is_ranges() const { return is_ranges_; }
  const VidRange& first() const { return first_; }
  const VidRange& second() const { return second_; }
  const std::vector<ValueId>& vids() const { return vids_; }

  bool empty() const {
    return is_ranges_ ? first_.is_dummy() && second_.is_dummy()
                      : vids_.empty();
  }

 private:
  VidSelection() = default;

  bool is_ranges_ = true;
  VidRange first_;
  VidRange second_;
  std::vector<ValueId> vids_;
};

// Per-query instrumentation reported by the enclave.
struct EnclaveStats {
  std::uint64_t loads = 0;
  std::uint32_t held_peak = 0;  // decrypted dictionary values held at once
};

// Simulated trusted module. It receives the master key at construction and
// afterwards interacts with the outside world only through the search
// interface: an encrypted token, a loader handle and column names come in,
// a ValueId selection goes out.
class Enclave {
 public:
  explicit Enclave(const MasterKey& mk) : master_(mk) {}

  // Dispatches to the search variant matching the dictionary's order
  // option. Throws AuthError when the token or a dictionary entry fails
  // authentication and TokenError on malformed token payloads.
  VidSelection dict_search(EdKind kind, const EncryptedRangeToken& token,
                           UntrustedLoader& loader,
                           const std::optional<EncryptedValue>& enc_rnd_offset,
                           std::string_view table_name,
                           std::string_view column_name,
                           EnclaveStats* stats = nullptr) const;

  // Decrypt an incoming value and re-encrypt it under the column key with
  // a fresh nonce; used when appending to a write-optimized store.
  EncryptedValue reencrypt(std::string_view table_name,
                           std::string_view column_name,
                           const EncryptedValue& incoming, Rng& rng) const;

  enum class ProbeSide { kStart, kEnd };

  // Binary search over anchor-shifted encodings, the primitive behind the
  // rotated dictionary search. kStart returns the first position whose
  // shifted encoding reaches the search value's, kEnd the last position
  // not beyond it (-1 when there is none).
  std::int64_t modular_bound_search(UntrustedLoader& loader,
                                    std::string_view search_value,
                                    std::string_view table_name,
                                    std::string_view column_name,
                                    ProbeSide side, std::size_t max_len) const;

 private:
  MasterKey master_;
};

}  // namespace edict
