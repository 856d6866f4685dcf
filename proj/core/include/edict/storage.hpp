#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edict/delta.hpp"
#include "edict/rng.hpp"
#include "edict/types.hpp"

namespace edict {

// On-disk layout of one store, all integers little-endian:
//
//   meta       "EDBD" | version u16 | kind u8 (0 = plain, 1..9) |
//              max_len u16 | bs_max u32 (0 when absent) | row_count u64 |
//              dict_count u64 | offset ciphertext (len u32, bytes) |
//              table name (len u16, bytes) | column name (len u16, bytes)
//   dict_head  per entry, in ValueId order: tail offset u64 | length u64
//   dict_tail  nonce(12) | body | tag(16) records, densely packed in a
//              fresh random order independent of the head order
//   av         one u32 per row
//   validity   one byte per row, 0 or 1 (only present for dynamic columns)
//
// Files are written to a temporary name and renamed, so readers see either
// the old or the new store.

inline constexpr std::uint16_t kStoreFormatVersion = 1;

// Writes meta, dict_head, dict_tail and av into dir, creating it if
// needed. The rng feeds the random tail placement.
void save(const EncodedColumnStore& store, const std::filesystem::path& dir,
          Rng& rng);

// Validates structure (magic, version, sizes, ValueId bounds, dense tail
// packing) without decrypting anything.
EncodedColumnStore load(const std::filesystem::path& dir);

void save_validity(const std::vector<std::uint8_t>& valid,
                   const std::filesystem::path& dir);

// All rows valid when the file is absent.
std::vector<std::uint8_t> load_validity(const std::filesystem::path& dir,
                                        std::size_t rows);

// A dynamic column is a store directory with a "delta" subdirectory.
void save_dynamic(const DynamicColumn& dc, const std::filesystem::path& dir,
                  Rng& rng);
DynamicColumn load_dynamic(const std::filesystem::path& dir);
bool has_delta(const std::filesystem::path& dir);

// Total size of the store's files, recursing into the delta when present.
std::uintmax_t store_bytes(const std::filesystem::path& dir);

// One value per line, UTF-8, no quoting; a trailing CR per line is
// dropped. Values cannot contain newlines.
std::vector<std::string> read_value_lines(const std::filesystem::path& path);

}  // namespace edict
