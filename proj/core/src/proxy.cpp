#include "edict/proxy.hpp"

#include <algorithm>

#include "edict/errors.hpp"
#include "edict/order_encoding.hpp"

namespace edict {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Filter parse_filter(std::string_view text) {
  std::string_view rest = trim(text);
  const std::size_t space = rest.find(' ');
  if (space == std::string_view::npos) {
    throw ParseError("filter needs an operator and an argument");
  }
  const std::string_view op = rest.substr(0, space);
  std::string_view arg = trim(rest.substr(space + 1));

  Filter f;
  if (op == "eq") {
    f.op = Filter::Op::kEq;
  } else if (op == "lt") {
    f.op = Filter::Op::kLt;
  } else if (op == "le") {
    f.op = Filter::Op::kLe;
  } else if (op == "gt") {
    f.op = Filter::Op::kGt;
  } else if (op == "ge") {
    f.op = Filter::Op::kGe;
  } else if (op == "range") {
    f.op = Filter::Op::kRange;
  } else {
    throw ParseError("unknown filter operator '" + std::string(op) + "'");
  }

  if (f.op != Filter::Op::kRange) {
    f.a = std::string(arg);
    return f;
  }

  if (arg.size() < 3) {
    throw ParseError("range filter needs bracketed endpoints");
  }
  const char open = arg.front();
  const char close = arg.back();
  if (open != '[' && open != '(') {
    throw ParseError("range must open with '[' or '('");
  }
  if (close != ']' && close != ')') {
    throw ParseError("range must close with ']' or ')'");
  }
  f.a_inclusive = open == '[';
  f.b_inclusive = close == ']';
  const std::string_view inner = arg.substr(1, arg.size() - 2);
  const std::size_t comma = inner.find(',');
  if (comma == std::string_view::npos) {
    throw ParseError("range endpoints must be separated by a comma");
  }
  f.a = std::string(trim(inner.substr(0, comma)));
  f.b = std::string(trim(inner.substr(comma + 1)));
  return f;
}

SearchRange normalize_filter(const Filter& f) {
  switch (f.op) {
    case Filter::Op::kEq:
      return SearchRange::equals(f.a);
    case Filter::Op::kLt:
      return SearchRange::less_than(f.a, false);
    case Filter::Op::kLe:
      return SearchRange::less_than(f.a, true);
    case Filter::Op::kGt:
      return SearchRange::greater_than(f.a, false);
    case Filter::Op::kGe:
      return SearchRange::greater_than(f.a, true);
    case Filter::Op::kRange:
      return SearchRange::interval(f.a, f.a_inclusive, f.b, f.b_inclusive);
  }
  throw ParseError("unreachable filter operator");
}

std::string encode_bound_payload(std::uint8_t tag, std::string_view value,
                                 std::size_t max_len) {
  std::string payload;
  payload.reserve(1 + max_len);
  payload.push_back(static_cast<char>(tag));
  payload.append(value);
  payload.resize(1 + max_len, '\0');
  return payload;
}

EncryptedRangeToken encrypt_range(const MasterKey& mk,
                                  std::string_view table_name,
                                  std::string_view column_name,
                                  const SearchRange& range,
                                  std::size_t max_len, Rng& rng) {
  const ColumnKey key = derive_key(mk, table_name, column_name);

  std::uint8_t lo_tag = kTagNegInf;
  std::string_view lo_value;
  if (range.lo_kind() == SearchRange::LoKind::kValue) {
    check_value(range.lo(), max_len);
    lo_tag = range.lo_inclusive() ? kTagInclusive : kTagExclusive;
    lo_value = range.lo();
  }
  std::uint8_t hi_tag = kTagPosInf;
  std::string_view hi_value;
  if (range.hi_kind() == SearchRange::HiKind::kValue) {
    check_value(range.hi(), max_len);
    hi_tag = range.hi_inclusive() ? kTagInclusive : kTagExclusive;
    hi_value = range.hi();
  }

  EncryptedRangeToken token;
  token.lo = pae_enc(key, rng, encode_bound_payload(lo_tag, lo_value, max_len));
  token.hi = pae_enc(key, rng, encode_bound_payload(hi_tag, hi_value, max_len));
  return token;
}

std::vector<std::string> decrypt_column(
    const MasterKey& mk, std::string_view table_name,
    std::string_view column_name, const std::vector<EncryptedValue>& ec) {
  const ColumnKey key = derive_key(mk, table_name, column_name);
  std::vector<std::string> out;
  out.reserve(ec.size());
  for (const EncryptedValue& c : ec) {
    out.push_back(pae_dec(key, c));
  }
  return out;
}

QueryResult run_query(const EncodedColumnStore& store,
                      const SearchRange& range, const MasterKey& mk, Rng& rng,
                      unsigned workers) {
  QueryResult result;
  if (store.kind.is_plain()) {
    result.rids = plain_search(store, range, workers);
    result.values.reserve(result.rids.size());
    for (RecordId rid : result.rids) {
      const auto& body = store.enc_dict[store.av.vids[rid]].body;
      result.values.emplace_back(body.begin(), body.end());
    }
    return result;
  }

  const EncryptedRangeToken token = encrypt_range(
      mk, store.table_name, store.column_name, range, store.max_len, rng);
  const Enclave enclave(mk);
  result.rids =
      server_search(store, enclave, token, workers, &result.counters);
  const std::vector<EncryptedValue> ec =
      reconstruct(store.enc_dict, store.av, result.rids);
  result.values =
      decrypt_column(mk, store.table_name, store.column_name, ec);
  return result;
}

}  // namespace edict
