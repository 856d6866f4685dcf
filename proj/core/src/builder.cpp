#include "edict/builder.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "edict/errors.hpp"
#include "edict/order_encoding.hpp"

namespace edict {

namespace {

// Remap every attribute vector entry through old-vid -> new-vid.
AttributeVector remap(const AttributeVector& av,
                      const std::vector<ValueId>& perm) {
  AttributeVector out;
  out.vids.reserve(av.size());
  for (ValueId vid : av.vids) {
    out.vids.push_back(perm[vid]);
  }
  return out;
}

// Sort dictionary indices by value, breaking ties with random keys so that
// runs of equal values end up in random internal order.
std::vector<std::uint32_t> sorted_index_order(const Dictionary& d, Rng& rng) {
  const std::size_t n = d.size();
  std::vector<std::uint64_t> tie(n);
  for (auto& t : tie) {
    t = rng.next_u64();
  }
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (d.entries[a] != d.entries[b]) {
      return d.entries[a] < d.entries[b];
    }
    return tie[a] < tie[b];
  });
  return idx;
}

std::pair<Dictionary, AttributeVector> apply_positions(
    const Dictionary& d, const AttributeVector& av,
    const std::vector<ValueId>& new_pos) {
  Dictionary out;
  out.entries.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.entries[new_pos[i]] = d.entries[i];
  }
  return {std::move(out), remap(av, new_pos)};
}

}  // namespace

std::uint64_t BucketPlan::total() const {
  std::uint64_t sum = 0;
  for (std::uint32_t s : sizes) {
    sum += s;
  }
  return sum;
}

BucketPlan get_rnd_bucket_sizes(std::uint64_t occ_count, std::uint32_t bs_max,
                                Rng& rng) {
  if (occ_count == 0 || bs_max == 0) {
    throw Error("bucket sizes need a positive occurrence count and bs_max");
  }
  BucketPlan plan;
  std::uint64_t prev_total = 0;
  std::uint64_t total = 0;
  while (total < occ_count) {
    std::uint32_t rnd = static_cast<std::uint32_t>(rng.uniform_in(1, bs_max));
    plan.sizes.push_back(rnd);
    prev_total = total;
    total += rnd;
  }
  plan.sizes.back() = static_cast<std::uint32_t>(occ_count - prev_total);
  return plan;
}

std::pair<Dictionary, AttributeVector> split_revealing(const PlainColumn& col) {
  Dictionary d;
  AttributeVector av;
  av.vids.reserve(col.size());
  std::unordered_map<std::string_view, ValueId> seen;
  seen.reserve(col.size());
  for (const auto& v : col.values()) {
    auto [it, inserted] = seen.emplace(v, static_cast<ValueId>(d.size()));
    if (inserted) {
      d.entries.push_back(v);
    }
    av.vids.push_back(it->second);
  }
  return {std::move(d), std::move(av)};
}

std::pair<Dictionary, AttributeVector> split_smoothing(const PlainColumn& col,
                                                       std::uint32_t bs_max,
                                                       Rng& rng) {
  if (bs_max == 0) {
    throw Error("bs_max must be at least 1");
  }
  Dictionary d;
  AttributeVector av;
  av.vids.assign(col.size(), 0);

  // Distinct values in first appearance order, with their occurrence rows.
  std::vector<std::string_view> order;
  std::unordered_map<std::string_view, std::vector<RecordId>> occ;
  occ.reserve(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) {
    auto [it, inserted] = occ.try_emplace(col[i]);
    if (inserted) {
      order.push_back(col[i]);
    }
    it->second.push_back(static_cast<RecordId>(i));
  }

  for (std::string_view v : order) {
    const auto& rows = occ[v];
    BucketPlan plan = get_rnd_bucket_sizes(rows.size(), bs_max, rng);
    ValueId first_vid = static_cast<ValueId>(d.size());
    for (std::size_t b = 0; b < plan.count(); ++b) {
      d.entries.emplace_back(v);
    }
    // Expand the ValueIds by bucket size, then shuffle so each occurrence
    // picks one at random while the exact usage counts are preserved.
    std::vector<ValueId> slots;
    slots.reserve(rows.size());
    for (std::size_t b = 0; b < plan.count(); ++b) {
      for (std::uint32_t k = 0; k < plan.sizes[b]; ++k) {
        slots.push_back(first_vid + static_cast<ValueId>(b));
      }
    }
    rng.shuffle(slots);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      av.vids[rows[k]] = slots[k];
    }
  }
  return {std::move(d), std::move(av)};
}

std::pair<Dictionary, AttributeVector> split_hiding(const PlainColumn& col,
                                                    Rng& rng) {
  Dictionary d;
  d.entries = col.values();
  AttributeVector av;
  av.vids.assign(col.size(), 0);

  std::vector<std::string_view> order;
  std::unordered_map<std::string_view, std::vector<RecordId>> occ;
  occ.reserve(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) {
    auto [it, inserted] = occ.try_emplace(col[i]);
    if (inserted) {
      order.push_back(col[i]);
    }
    it->second.push_back(static_cast<RecordId>(i));
  }
  // Rows holding a value and dictionary entries holding it are the same
  // index set; a random bijection between them hides which row produced
  // which entry. Values are visited in first appearance order so a fixed
  // seed reproduces the assignment.
  for (std::string_view v : order) {
    const auto& rows = occ[v];
    std::vector<ValueId> slots(rows.begin(), rows.end());
    rng.shuffle(slots);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      av.vids[rows[k]] = slots[k];
    }
  }
  return {std::move(d), std::move(av)};
}

std::pair<Dictionary, AttributeVector> arrange_sorted(const Dictionary& d,
                                                      const AttributeVector& av,
                                                      Rng& rng) {
  auto idx = sorted_index_order(d, rng);
  std::vector<ValueId> new_pos(d.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    new_pos[idx[k]] = static_cast<ValueId>(k);
  }
  return apply_positions(d, av, new_pos);
}

std::tuple<Dictionary, AttributeVector, std::uint64_t> arrange_rotated(
    const Dictionary& d, const AttributeVector& av, Rng& rng) {
  const std::size_t n = d.size();
  std::uint64_t offset = n == 0 ? 0 : rng.uniform(n);
  auto idx = sorted_index_order(d, rng);
  std::vector<ValueId> new_pos(n);
  for (std::size_t k = 0; k < n; ++k) {
    new_pos[idx[k]] = static_cast<ValueId>((k + offset) % n);
  }
  auto [dict, vec] = apply_positions(d, av, new_pos);
  return {std::move(dict), std::move(vec), offset};
}

std::pair<Dictionary, AttributeVector> arrange_unsorted(
    const Dictionary& d, const AttributeVector& av, Rng& rng) {
  std::vector<ValueId> new_pos(d.size());
  std::iota(new_pos.begin(), new_pos.end(), 0);
  rng.shuffle(new_pos);
  return apply_positions(d, av, new_pos);
}

EncodedColumnStore build(const PlainColumn& col, const BuildParams& params,
                         const MasterKey& mk, std::string_view table_name,
                         std::string_view column_name, Rng& rng) {
  for (const auto& v : col.values()) {
    check_value(v, col.max_len());
  }

  const EdKind kind = params.kind;
  const bool smoothing =
      !kind.is_plain() && kind.repetition() == Repetition::kSmoothing;
  if (smoothing && (!params.bs_max || *params.bs_max == 0)) {
    throw Error("smoothing kinds require bs_max >= 1");
  }

  Dictionary d;
  AttributeVector av;
  if (kind.is_plain() || kind.repetition() == Repetition::kRevealing) {
    std::tie(d, av) = split_revealing(col);
  } else if (smoothing) {
    std::tie(d, av) = split_smoothing(col, *params.bs_max, rng);
  } else {
    std::tie(d, av) = split_hiding(col, rng);
  }

  EncodedColumnStore store;
  store.kind = kind;
  store.max_len = col.max_len();
  store.table_name = std::string(table_name);
  store.column_name = std::string(column_name);
  if (smoothing) {
    store.bs_max = *params.bs_max;
  }

  std::uint64_t offset = 0;
  if (kind.is_plain() || kind.order() == Order::kSorted) {
    std::tie(d, av) = arrange_sorted(d, av, rng);
  } else if (kind.order() == Order::kRotated) {
    std::tie(d, av, offset) = arrange_rotated(d, av, rng);
  } else {
    std::tie(d, av) = arrange_unsorted(d, av, rng);
  }
  store.av = std::move(av);

  if (kind.is_plain()) {
    store.enc_dict.reserve(d.size());
    for (const auto& v : d.entries) {
      EncryptedValue plain;
      plain.body.assign(v.begin(), v.end());
      store.enc_dict.push_back(std::move(plain));
    }
    return store;
  }

  const ColumnKey key = derive_key(mk, table_name, column_name);
  store.enc_dict.reserve(d.size());
  for (const auto& v : d.entries) {
    store.enc_dict.push_back(pae_enc(key, rng, v));
  }
  if (kind.order() == Order::kRotated) {
    std::string offset_bytes(8, '\0');
    for (int i = 0; i < 8; ++i) {
      offset_bytes[i] = static_cast<char>(offset >> (8 * (7 - i)));
    }
    store.enc_rnd_offset = pae_enc(key, rng, offset_bytes);
  }
  return store;
}

}  // namespace edict
