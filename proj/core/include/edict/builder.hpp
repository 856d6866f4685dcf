#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "edict/crypto.hpp"
#include "edict/rng.hpp"
#include "edict/types.hpp"

namespace edict {

// How one value's occurrences are distributed over duplicated dictionary
// entries when frequencies are smoothed.
struct BucketPlan {
  std::vector<std::uint32_t> sizes;

  std::size_t count() const { return sizes.size(); }
  std::uint64_t total() const;
};

struct BuildParams {
  EdKind kind = EdKind::ed(1);
  std::optional<std::uint32_t> bs_max;  // required for smoothing kinds
};

// Draw bucket sizes uniformly from [1, bs_max] until they cover occ_count,
// then correct the last one so the total matches exactly.
BucketPlan get_rnd_bucket_sizes(std::uint64_t occ_count, std::uint32_t bs_max,
                                Rng& rng);

// One dictionary entry per distinct value, in first appearance order.
std::pair<Dictionary, AttributeVector> split_revealing(const PlainColumn& col);

// Each distinct value appears once per bucket; every ValueId is used in the
// attribute vector exactly as often as its bucket size.
std::pair<Dictionary, AttributeVector> split_smoothing(const PlainColumn& col,
                                                       std::uint32_t bs_max,
                                                       Rng& rng);

// One dictionary entry per row; every ValueId used exactly once, with the
// assignment of duplicate plaintexts to entries randomized.
std::pair<Dictionary, AttributeVector> split_hiding(const PlainColumn& col,
                                                    Rng& rng);

// Reorder the dictionary lexicographically; runs of equal values are
// ordered randomly among themselves.
std::pair<Dictionary, AttributeVector> arrange_sorted(const Dictionary& d,
                                                      const AttributeVector& av,
                                                      Rng& rng);

// Sorted order cyclically shifted by a uniform random offset.
std::tuple<Dictionary, AttributeVector, std::uint64_t> arrange_rotated(
    const Dictionary& d, const AttributeVector& av, Rng& rng);

// Uniform random permutation of the dictionary.
std::pair<Dictionary, AttributeVector> arrange_unsorted(
    const Dictionary& d, const AttributeVector& av, Rng& rng);

// Split, arrange and encrypt a column according to the selected kind.
EncodedColumnStore build(const PlainColumn& col, const BuildParams& params,
                         const MasterKey& mk, std::string_view table_name,
                         std::string_view column_name, Rng& rng);

}  // namespace edict
