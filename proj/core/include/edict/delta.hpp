#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "edict/builder.hpp"
#include "edict/proxy.hpp"
#include "edict/types.hpp"

namespace edict {

// Which of the two stores a row id refers to.
enum class StoreSel { kMain, kDelta };

// A column that accepts changes: a read-optimized main store of any kind,
// a write-optimized append-only delta store that hides both order and
// frequency, and one validity flag per row in each.
struct DynamicColumn {
  EncodedColumnStore main;
  EncodedColumnStore delta;
  std::vector<std::uint8_t> valid_main;
  std::vector<std::uint8_t> valid_delta;

  std::size_t live_rows() const;
};

// Attach an empty delta store and all-valid flags to a freshly built main.
DynamicColumn make_dynamic(EncodedColumnStore main);

// Append one value to the delta store; the value is re-encrypted inside
// the enclave under a fresh nonce. Returns the new delta row id.
RecordId append_row(DynamicColumn& dc, std::string_view value,
                    const MasterKey& mk, Rng& rng);

// Clear the row's validity flag; later queries skip it. Idempotent.
void delete_row(DynamicColumn& dc, StoreSel sel, RecordId rid);

// Delete the old row and append the replacement; returns the new row id.
RecordId update_row(DynamicColumn& dc, StoreSel sel, RecordId rid,
                    std::string_view value, const MasterKey& mk, Rng& rng);

// Query both stores and merge the valid matches: main rows first, then
// delta rows, each ascending.
QueryResult query_dynamic(const DynamicColumn& dc, const SearchRange& range,
                          const MasterKey& mk, Rng& rng, unsigned workers = 1);

// Fold all valid rows of both stores into a fresh main store of the
// original kind. Every dictionary ciphertext is new, rotated kinds draw a
// fresh offset and unsorted kinds a fresh shuffle; deleted rows are
// purged and the delta store is reset.
void merge(DynamicColumn& dc, const MasterKey& mk, Rng& rng);

}  // namespace edict
