#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "edict/builder.hpp"
#include "edict/crypto.hpp"
#include "edict/enclave.hpp"
#include "edict/proxy.hpp"
#include "edict/types.hpp"

namespace edict::test {

// Build a store directly from an explicit plaintext dictionary order,
// sidestepping the builder's randomness. The offset only feeds the
// encrypted rotation metadata; callers pass an already rotated order.
inline EncodedColumnStore make_store_raw(
    EdKind kind, const std::vector<std::string>& dict_order,
    const std::vector<ValueId>& av, std::size_t max_len,
    std::optional<std::uint64_t> offset, const MasterKey& mk, Rng& rng,
    std::optional<std::uint32_t> bs_max = {}) {
  EncodedColumnStore store;
  store.kind = kind;
  store.max_len = max_len;
  store.table_name = "t";
  store.column_name = "c";
  store.bs_max = bs_max;
  const ColumnKey key = derive_key(mk, store.table_name, store.column_name);
  for (const auto& v : dict_order) {
    store.enc_dict.push_back(pae_enc(key, rng, v));
  }
  store.av.vids = av;
  if (offset.has_value()) {
    std::string bytes(8, '\0');
    for (int i = 0; i < 8; ++i) {
      bytes[i] = static_cast<char>(*offset >> (8 * (7 - i)));
    }
    store.enc_rnd_offset = pae_enc(key, rng, bytes);
  }
  return store;
}

// The running example used throughout the unit tests: a small first-name
// column whose canonical split is dictionary (Hans, Jessica, Archie) with
// attribute vector (1, 2, 1, 1, 0, 2).
inline PlainColumn sample_names_column() {
  return PlainColumn(std::vector<std::string>{"Jessica", "Archie", "Jessica",
                                              "Jessica", "Hans", "Archie"});
}

inline MasterKey test_master_key() {
  MasterKey mk;
  for (std::size_t i = 0; i < mk.bytes.size(); ++i) {
    mk.bytes[i] = static_cast<std::uint8_t>(0xA0 + i);
  }
  return mk;
}

// Independent of the search path: decrypt every dictionary entry directly.
inline std::vector<std::string> decrypt_dictionary(
    const EncodedColumnStore& store, const MasterKey& mk) {
  std::vector<std::string> out;
  out.reserve(store.dict_size());
  if (store.kind.is_plain()) {
    for (const auto& c : store.enc_dict) {
      out.emplace_back(c.body.begin(), c.body.end());
    }
    return out;
  }
  const ColumnKey key = derive_key(mk, store.table_name, store.column_name);
  for (const auto& c : store.enc_dict) {
    out.push_back(pae_dec(key, c));
  }
  return out;
}

// Brute-force filter oracle: scan the plaintext values directly.
inline std::vector<RecordId> oracle_matching_rids(
    const std::vector<std::string>& values, const SearchRange& range) {
  std::vector<RecordId> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (range.contains(values[i])) {
      out.push_back(static_cast<RecordId>(i));
    }
  }
  return out;
}

// Brute-force dictionary oracle: every position whose plaintext lies in
// the range.
inline std::set<std::uint32_t> oracle_matching_positions(
    const std::vector<std::string>& dict_plain, const SearchRange& range) {
  std::set<std::uint32_t> out;
  for (std::size_t i = 0; i < dict_plain.size(); ++i) {
    if (range.contains(dict_plain[i])) {
      out.insert(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

inline std::set<std::uint32_t> selection_positions(const VidSelection& sel,
                                                   std::size_t dict_size) {
  std::set<std::uint32_t> out;
  if (sel.is_ranges()) {
    for (const VidRange* r : {&sel.first(), &sel.second()}) {
      if (r->is_dummy()) {
        continue;
      }
      for (std::uint64_t v = r->lo; v <= r->hi && v < dict_size; ++v) {
        out.insert(static_cast<std::uint32_t>(v));
      }
    }
  } else {
    out.insert(sel.vids().begin(), sel.vids().end());
  }
  return out;
}

inline std::multiset<std::string> as_multiset(
    const std::vector<std::string>& values) {
  return std::multiset<std::string>(values.begin(), values.end());
}

// Encrypt the range and run one enclave dictionary search against the
// store, surfacing the load count and instrumentation.
inline VidSelection enclave_search(const EncodedColumnStore& store,
                                   const SearchRange& range,
                                   const MasterKey& mk, Rng& rng,
                                   EnclaveStats* stats = nullptr) {
  const EncryptedRangeToken token =
      encrypt_range(mk, store.table_name, store.column_name, range,
                    store.max_len, rng);
  UntrustedLoader loader(store.enc_dict);
  const Enclave enclave(mk);
  return enclave.dict_search(store.kind, token, loader, store.enc_rnd_offset,
                             store.table_name, store.column_name, stats);
}

// Reusable invariant bundle: split correctness against the source column,
// frequency shape per repetition option, order shape per order option.
inline void check_store_invariants(const EncodedColumnStore& store,
                                   const PlainColumn& source,
                                   const MasterKey& mk) {
  store.validate();
  const std::vector<std::string> dict_plain = decrypt_dictionary(store, mk);
  Dictionary d;
  d.entries = dict_plain;
  if (!verify_split(source, d, store.av)) {
    throw std::logic_error("split correctness violated");
  }
  if (store.av.size() != source.size()) {
    throw std::logic_error("attribute vector size mismatch");
  }

  std::map<ValueId, std::uint64_t> counts;
  for (ValueId vid : store.av.vids) {
    ++counts[vid];
  }
  if (store.kind.is_plain() ||
      store.kind.repetition() == Repetition::kRevealing) {
    if (store.dict_size() != unique_values(source).size()) {
      throw std::logic_error("revealing dictionary size mismatch");
    }
    for (const auto& [vid, count] : counts) {
      if (count != occurrences(source, dict_plain[vid]).size()) {
        throw std::logic_error("revealing frequency mismatch");
      }
    }
  } else if (store.kind.repetition() == Repetition::kSmoothing) {
    const std::uint64_t bs_max = store.bs_max.value();
    if (store.dict_size() < unique_values(source).size() ||
        store.dict_size() > source.size()) {
      throw std::logic_error("smoothing dictionary size out of bounds");
    }
    if (counts.size() != store.dict_size()) {
      throw std::logic_error("smoothing left an unused dictionary entry");
    }
    for (const auto& [vid, count] : counts) {
      if (count < 1 || count > bs_max) {
        throw std::logic_error("smoothing frequency out of bounds");
      }
    }
  } else {
    if (store.dict_size() != source.size()) {
      throw std::logic_error("hiding dictionary size mismatch");
    }
    for (const auto& [vid, count] : counts) {
      if (count != 1) {
        throw std::logic_error("hiding frequency must be one");
      }
    }
    if (counts.size() != store.dict_size()) {
      throw std::logic_error("hiding must use every dictionary entry");
    }
  }

  if (!store.kind.is_plain() && store.kind.order() == Order::kSorted) {
    if (!std::is_sorted(dict_plain.begin(), dict_plain.end())) {
      throw std::logic_error("sorted dictionary out of order");
    }
  }
  if (!store.kind.is_plain() && store.kind.order() == Order::kRotated) {
    // Some rotation of the dictionary must be sorted.
    const std::size_t n = dict_plain.size();
    bool ok = n <= 1;
    for (std::size_t shift = 0; !ok && shift < n; ++shift) {
      bool sorted = true;
      for (std::size_t i = 0; i + 1 < n && sorted; ++i) {
        sorted = dict_plain[(shift + i) % n] <= dict_plain[(shift + i + 1) % n];
      }
      ok = sorted;
    }
    if (!ok) {
      throw std::logic_error("no rotation of the dictionary is sorted");
    }
  }
}

}  // namespace edict::test
