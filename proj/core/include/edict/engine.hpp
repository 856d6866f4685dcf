#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edict/enclave.hpp"
#include "edict/types.hpp"

namespace edict {

// Row ids whose ValueId falls in either selected range; dummy ranges match
// nothing. Results are ascending. With more than one worker the vector is
// scanned in contiguous blocks whose results are concatenated, so the
// output is identical for any worker count.
std::vector<RecordId> av_search_range(const AttributeVector& av,
                                      const VidRange& first,
                                      const VidRange& second,
                                      unsigned workers = 1);

// Row ids whose ValueId appears in the ascending id list. Observable
// behavior is the compare-every-pair contract; the scan uses binary
// membership per entry, so the cost stays within O(|av| * |vids|).
std::vector<RecordId> av_search_set(const AttributeVector& av,
                                    const std::vector<ValueId>& vids,
                                    unsigned workers = 1);

std::vector<RecordId> av_search(const AttributeVector& av,
                                const VidSelection& selection,
                                unsigned workers = 1);

// Undo the split for the selected rows: one dictionary ciphertext per row
// id, in row order. No decryption happens here.
std::vector<EncryptedValue> reconstruct(
    const std::vector<EncryptedValue>& enc_dict, const AttributeVector& av,
    const std::vector<RecordId>& rids);

// Empirical audit of what the attribute vector reveals about value
// frequencies, as a per-ValueId histogram.
struct LeakageReport {
  std::vector<std::uint64_t> histogram;  // uses of each ValueId
  std::uint64_t max_count = 0;
  std::uint64_t min_count = 0;
  bool bound_ok = true;  // histogram consistent with the kind's guarantee
  std::string frequency_class;
  std::string order_class;
};

LeakageReport leakage_profile(const EncodedColumnStore& store);

// One enclave invocation, then the attribute vector scan matching the
// selection shape. Counts from the loader and the enclave are surfaced for
// complexity checks.
struct SearchCounters {
  std::uint64_t enclave_loads = 0;
  std::uint32_t enclave_held_peak = 0;
  double scan_seconds = 0.0;
};

std::vector<RecordId> server_search(const EncodedColumnStore& store,
                                    const Enclave& enclave,
                                    const EncryptedRangeToken& token,
                                    unsigned workers = 1,
                                    SearchCounters* counters = nullptr);

// Search path for plaintext dictionaries: a binary search over the stored
// values, no enclave involved.
std::vector<RecordId> plain_search(const EncodedColumnStore& store,
                                   const SearchRange& range,
                                   unsigned workers = 1);

}  // namespace edict
