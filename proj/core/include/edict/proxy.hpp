#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edict/crypto.hpp"
#include "edict/enclave.hpp"
#include "edict/engine.hpp"
#include "edict/types.hpp"

namespace edict {

// A single-column filter expression as accepted by the command line:
//   eq V | lt V | le V | gt V | ge V | range [V,W] | range (V,W)
// with either bracket of the range independently square (inclusive) or
// round (exclusive). Range endpoint values must not contain a comma.
struct Filter {
  enum class Op { kEq, kLt, kLe, kGt, kGe, kRange };

  Op op = Op::kEq;
  std::string a;
  std::string b;
  bool a_inclusive = true;
  bool b_inclusive = true;
};

// Throws ParseError on malformed input.
Filter parse_filter(std::string_view text);

// Every filter becomes one range select: equality collapses to a closed
// degenerate range, one-sided comparisons get an infinity sentinel on the
// open side.
SearchRange normalize_filter(const Filter& f);

// Tag byte followed by the value, NUL-padded to the column maximum: all
// filter shapes produce payloads (and therefore tokens) of one length.
std::string encode_bound_payload(std::uint8_t tag, std::string_view value,
                                 std::size_t max_len);

// Encrypt both endpoints under the column key with independent nonces.
EncryptedRangeToken encrypt_range(const MasterKey& mk,
                                  std::string_view table_name,
                                  std::string_view column_name,
                                  const SearchRange& range,
                                  std::size_t max_len, Rng& rng);

// Decrypt a reconstructed result column entry by entry. A single
// authentication failure rejects the whole result.
std::vector<std::string> decrypt_column(const MasterKey& mk,
                                        std::string_view table_name,
                                        std::string_view column_name,
                                        const std::vector<EncryptedValue>& ec);

struct QueryResult {
  std::vector<RecordId> rids;       // ascending
  std::vector<std::string> values;  // in rid order
  SearchCounters counters;
};

// The full pipeline: encrypt the range, search the dictionary inside the
// enclave, scan the attribute vector, reconstruct and decrypt. Plaintext
// stores skip the crypto and the enclave.
QueryResult run_query(const EncodedColumnStore& store, const SearchRange& range,
                      const MasterKey& mk, Rng& rng, unsigned workers = 1);

}  // namespace edict
