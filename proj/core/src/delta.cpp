#include "edict/delta.hpp"

#include <algorithm>

#include "edict/enclave.hpp"
#include "edict/errors.hpp"
#include "edict/order_encoding.hpp"

namespace edict {

namespace {

std::vector<std::uint8_t>& flags_for(DynamicColumn& dc, StoreSel sel) {
  return sel == StoreSel::kMain ? dc.valid_main : dc.valid_delta;
}

// Decrypt the live values of one store in row order. Plaintext stores just
// copy their bodies.
void collect_valid(const EncodedColumnStore& store,
                   const std::vector<std::uint8_t>& valid,
                   const MasterKey& mk, std::vector<std::string>& out) {
  const bool plain = store.kind.is_plain();
  ColumnKey key;
  if (!plain) {
    key = derive_key(mk, store.table_name, store.column_name);
  }
  // Decrypt each dictionary entry once, then expand through the rows.
  std::vector<std::string> dict(store.dict_size());
  std::vector<bool> have(store.dict_size(), false);
  for (std::size_t j = 0; j < store.rows(); ++j) {
    if (valid[j] == 0) {
      continue;
    }
    const ValueId vid = store.av.vids[j];
    if (!have[vid]) {
      const EncryptedValue& c = store.enc_dict[vid];
      dict[vid] = plain ? std::string(c.body.begin(), c.body.end())
                        : pae_dec(key, c);
      have[vid] = true;
    }
    out.push_back(dict[vid]);
  }
}

}  // namespace

std::size_t DynamicColumn::live_rows() const {
  const auto ones = [](const std::vector<std::uint8_t>& v) {
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
  };
  return ones(valid_main) + ones(valid_delta);
}

DynamicColumn make_dynamic(EncodedColumnStore main) {
  DynamicColumn dc;
  dc.valid_main.assign(main.rows(), 1);
  dc.delta.kind = EdKind::ed(9);
  dc.delta.max_len = main.max_len;
  dc.delta.table_name = main.table_name;
  dc.delta.column_name = main.column_name;
  dc.main = std::move(main);
  return dc;
}

RecordId append_row(DynamicColumn& dc, std::string_view value,
                    const MasterKey& mk, Rng& rng) {
  check_value(value, dc.delta.max_len);
  if (dc.delta.rows() >= kMaxRows) {
    throw LengthError("delta store exceeds the supported row count");
  }
  // The proxy ships the value encrypted; the enclave re-encrypts it with a
  // fresh nonce before it is stored.
  const ColumnKey key =
      derive_key(mk, dc.delta.table_name, dc.delta.column_name);
  const EncryptedValue incoming = pae_enc(key, rng, value);
  const Enclave enclave(mk);
  EncryptedValue stored =
      enclave.reencrypt(dc.delta.table_name, dc.delta.column_name, incoming,
                        rng);

  const RecordId rid = static_cast<RecordId>(dc.delta.rows());
  dc.delta.enc_dict.push_back(std::move(stored));
  dc.delta.av.vids.push_back(rid);
  dc.valid_delta.push_back(1);
  return rid;
}

void delete_row(DynamicColumn& dc, StoreSel sel, RecordId rid) {
  auto& flags = flags_for(dc, sel);
  if (rid >= flags.size()) {
    throw IndexError("record id " + std::to_string(rid) +
                     " out of range for " + std::to_string(flags.size()) +
                     " rows");
  }
  flags[rid] = 0;
}

RecordId update_row(DynamicColumn& dc, StoreSel sel, RecordId rid,
                    std::string_view value, const MasterKey& mk, Rng& rng) {
  delete_row(dc, sel, rid);
  return append_row(dc, value, mk, rng);
}

QueryResult query_dynamic(const DynamicColumn& dc, const SearchRange& range,
                          const MasterKey& mk, Rng& rng, unsigned workers) {
  QueryResult out;
  const auto take = [&](const EncodedColumnStore& store,
                        const std::vector<std::uint8_t>& valid,
                        RecordId rid_base) {
    if (store.rows() == 0) {
      return;
    }
    QueryResult part = run_query(store, range, mk, rng, workers);
    for (std::size_t i = 0; i < part.rids.size(); ++i) {
      if (valid[part.rids[i]] != 0) {
        out.rids.push_back(rid_base + part.rids[i]);
        out.values.push_back(std::move(part.values[i]));
      }
    }
    out.counters.enclave_loads += part.counters.enclave_loads;
    out.counters.enclave_held_peak = std::max(out.counters.enclave_held_peak,
                                              part.counters.enclave_held_peak);
    out.counters.scan_seconds += part.counters.scan_seconds;
  };
  take(dc.main, dc.valid_main, 0);
  take(dc.delta, dc.valid_delta, static_cast<RecordId>(dc.main.rows()));
  return out;
}

void merge(DynamicColumn& dc, const MasterKey& mk, Rng& rng) {
  std::vector<std::string> live;
  live.reserve(dc.live_rows());
  collect_valid(dc.main, dc.valid_main, mk, live);
  collect_valid(dc.delta, dc.valid_delta, mk, live);

  BuildParams params;
  params.kind = dc.main.kind;
  params.bs_max = dc.main.bs_max;
  PlainColumn column(std::move(live), dc.main.max_len);
  EncodedColumnStore fresh = build(column, params, mk, dc.main.table_name,
                                   dc.main.column_name, rng);

  const std::string table = dc.main.table_name;
  const std::string col = dc.main.column_name;
  const std::size_t max_len = dc.main.max_len;
  dc.main = std::move(fresh);
  dc.valid_main.assign(dc.main.rows(), 1);
  dc.delta = EncodedColumnStore{};
  dc.delta.kind = EdKind::ed(9);
  dc.delta.max_len = max_len;
  dc.delta.table_name = table;
  dc.delta.column_name = col;
  dc.valid_delta.clear();
}

}  // namespace edict
