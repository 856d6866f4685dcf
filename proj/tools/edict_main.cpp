// Command line front end: build encrypted column stores from value files,
// run range queries against them, audit their leakage, benchmark their
// search behavior and apply dynamic changes.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "edict/builder.hpp"
#include "edict/delta.hpp"
#include "edict/engine.hpp"
#include "edict/errors.hpp"
#include "edict/proxy.hpp"
#include "edict/storage.hpp"

namespace {

using namespace edict;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitCryptoError = 3;

MasterKey read_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open key file " + path);
  }
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line.size() != 32) {
    throw FormatError("key file must hold exactly 32 hex characters");
  }
  MasterKey mk;
  for (std::size_t i = 0; i < 16; ++i) {
    const std::string byte = line.substr(2 * i, 2);
    char* end = nullptr;
    const long v = std::strtol(byte.c_str(), &end, 16);
    if (end != byte.c_str() + 2) {
      throw FormatError("key file contains a non-hex character");
    }
    mk.bytes[i] = static_cast<std::uint8_t>(v);
  }
  return mk;
}

Rng make_rng(const std::optional<std::uint64_t>& seed) {
  return seed.has_value() ? Rng(*seed) : Rng::from_os_entropy();
}

EdKind parse_kind(const std::string& text) {
  if (text == "plain") {
    return EdKind::plain();
  }
  if (text.size() == 1 && text[0] >= '1' && text[0] <= '9') {
    return EdKind::ed(text[0] - '0');
  }
  throw ParseError("--ed must be 1..9 or 'plain'");
}

int cmd_build(const std::string& input, const std::string& table,
              const std::string& column, const std::string& ed,
              std::optional<std::uint32_t> bs_max,
              std::optional<std::uint16_t> max_len,
              const std::string& key_file,
              std::optional<std::uint64_t> seed, const std::string& out) {
  const MasterKey mk = read_key_file(key_file);
  Rng rng = make_rng(seed);

  std::vector<std::string> values = read_value_lines(input);
  std::size_t len = 0;
  for (const auto& v : values) {
    len = std::max(len, v.size());
  }
  if (max_len.has_value()) {
    len = *max_len;
  }
  PlainColumn col(std::move(values), len);

  BuildParams params;
  params.kind = parse_kind(ed);
  params.bs_max = bs_max;
  EncodedColumnStore store = build(col, params, mk, table, column, rng);
  save(store, out, rng);

  std::cout << "dictionary entries: " << store.dict_size() << "\n"
            << "rows: " << store.rows() << "\n"
            << "on-disk bytes: " << store_bytes(out) << "\n";
  return kExitOk;
}

int cmd_query(const std::string& store_dir, const std::string& key_file,
              const std::string& filter_expr, bool count_only,
              unsigned workers, std::optional<std::uint64_t> seed) {
  const MasterKey mk = read_key_file(key_file);
  Rng rng = make_rng(seed);
  const SearchRange range = normalize_filter(parse_filter(filter_expr));

  QueryResult result;
  if (has_delta(store_dir)) {
    DynamicColumn dc = load_dynamic(store_dir);
    result = query_dynamic(dc, range, mk, rng, workers);
  } else {
    EncodedColumnStore store = load(store_dir);
    result = run_query(store, range, mk, rng, workers);
  }
  if (count_only) {
    std::cout << result.values.size() << "\n";
  } else {
    for (const auto& v : result.values) {
      std::cout << v << "\n";
    }
  }
  return kExitOk;
}

int cmd_audit(const std::string& store_dir) {
  const EncodedColumnStore store = load(store_dir);
  const LeakageReport report = leakage_profile(store);
  std::cout << "kind: " << store.kind.name() << "\n"
            << "order: " << report.order_class << "\n"
            << "frequency: " << report.frequency_class << "\n"
            << "dictionary entries: " << store.dict_size() << "\n"
            << "rows: " << store.rows() << "\n";
  if (!report.histogram.empty()) {
    std::cout << "value id use count min/max: " << report.min_count << "/"
              << report.max_count << "\n";
  }
  std::cout << "frequency bound " << (report.bound_ok ? "holds" : "VIOLATED")
            << "\n";
  if (store.kind.is_plain() ||
      store.kind.repetition() == Repetition::kRevealing) {
    std::cout << "histogram:";
    for (std::uint64_t c : report.histogram) {
      std::cout << ' ' << c;
    }
    std::cout << "\n";
  }
  return report.bound_ok ? kExitOk : kExitFailure;
}

int cmd_bench(const std::string& store_dir, const std::string& key_file,
              std::uint64_t queries, std::uint64_t range_size,
              std::optional<std::uint64_t> seed, unsigned workers) {
  const MasterKey mk = read_key_file(key_file);
  Rng rng = make_rng(seed);
  const EncodedColumnStore store = load(store_dir);
  if (store.kind.is_plain()) {
    throw ParseError("bench runs against encrypted stores");
  }

  // Sorted distinct values, decrypted client side, drive range selection.
  const ColumnKey key = derive_key(mk, store.table_name, store.column_name);
  std::set<std::string> distinct;
  for (const auto& c : store.enc_dict) {
    distinct.insert(pae_dec(key, c));
  }
  const std::vector<std::string> sorted(distinct.begin(), distinct.end());
  if (sorted.empty()) {
    throw ParseError("store is empty");
  }
  if (range_size == 0 || range_size > sorted.size()) {
    throw ParseError("--range-size must be in 1.." +
                     std::to_string(sorted.size()));
  }

  double total_loads = 0;
  double total_scan = 0;
  double total_rows = 0;
  for (std::uint64_t q = 0; q < queries; ++q) {
    const std::size_t i = rng.uniform(sorted.size() - range_size + 1);
    const SearchRange r =
        SearchRange::closed(sorted[i], sorted[i + range_size - 1]);
    QueryResult result = run_query(store, r, mk, rng, workers);
    total_loads += static_cast<double>(result.counters.enclave_loads);
    total_scan += result.counters.scan_seconds;
    total_rows += static_cast<double>(result.values.size());
  }
  const double n = static_cast<double>(queries);
  std::printf("queries: %llu\n", static_cast<unsigned long long>(queries));
  std::printf("range size: %llu\n",
              static_cast<unsigned long long>(range_size));
  std::printf("mean enclave loads: %.2f\n", total_loads / n);
  std::printf("mean scan seconds: %.6f\n", total_scan / n);
  std::printf("mean result rows: %.2f\n", total_rows / n);
  return kExitOk;
}

int cmd_append(const std::string& store_dir, const std::string& key_file,
               const std::string& value, std::optional<std::uint64_t> seed) {
  const MasterKey mk = read_key_file(key_file);
  Rng rng = make_rng(seed);
  DynamicColumn dc = load_dynamic(store_dir);
  const RecordId rid = append_row(dc, value, mk, rng);
  save_dynamic(dc, store_dir, rng);
  std::cout << "appended delta row " << rid << "\n";
  return kExitOk;
}

int cmd_delete(const std::string& store_dir, std::uint32_t rid,
               const std::string& which, std::optional<std::uint64_t> seed) {
  Rng rng = make_rng(seed);
  DynamicColumn dc = load_dynamic(store_dir);
  if (which == "main") {
    delete_row(dc, StoreSel::kMain, rid);
  } else if (which == "delta") {
    delete_row(dc, StoreSel::kDelta, rid);
  } else {
    throw ParseError("--which must be 'main' or 'delta'");
  }
  save_dynamic(dc, store_dir, rng);
  std::cout << "deleted " << which << " row " << rid << "\n";
  return kExitOk;
}

int cmd_merge(const std::string& store_dir, const std::string& key_file,
              std::optional<std::uint64_t> seed) {
  const MasterKey mk = read_key_file(key_file);
  Rng rng = make_rng(seed);
  DynamicColumn dc = load_dynamic(store_dir);
  merge(dc, mk, rng);
  save_dynamic(dc, store_dir, rng);
  std::cout << "merged; rows: " << dc.main.rows() << "\n";
  return kExitOk;
}

int cmd_keygen(const std::string& key_file) {
  Rng rng = Rng::from_os_entropy();
  const MasterKey mk = pae_gen(rng);
  std::ofstream out(key_file, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write key file " + key_file);
  }
  char buf[3];
  for (std::uint8_t b : mk.bytes) {
    std::snprintf(buf, sizeof(buf), "%02x", b);
    out << buf;
  }
  out << "\n";
  std::cout << "wrote " << key_file << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edict: encrypted dictionary column store"};
  app.require_subcommand(1);

  std::string input, table = "t", column = "c", ed = "1", key_file, out;
  std::string store_dir, filter_expr, value, which = "main";
  std::optional<std::uint32_t> bs_max;
  std::optional<std::uint16_t> max_len;
  std::optional<std::uint64_t> seed;
  std::uint64_t queries = 500;
  std::uint64_t range_size = 2;
  std::uint32_t rid = 0;
  unsigned workers = 1;
  bool count_only = false;

  auto* build_cmd = app.add_subcommand("build", "encode and encrypt a column");
  build_cmd->add_option("--input", input, "value file, one value per line")
      ->required();
  build_cmd->add_option("--table", table, "table name");
  build_cmd->add_option("--column", column, "column name");
  build_cmd->add_option("--ed", ed, "encrypted dictionary 1..9 or 'plain'");
  build_cmd->add_option("--bs-max", bs_max, "bucket bound for smoothing");
  build_cmd->add_option("--max-len", max_len, "fixed maximal value length");
  build_cmd->add_option("--key-file", key_file, "32 hex character key file")
      ->required();
  build_cmd->add_option("--seed", seed, "deterministic randomness seed");
  build_cmd->add_option("--out", out, "store directory")->required();

  auto* query_cmd = app.add_subcommand("query", "range filter a store");
  query_cmd->add_option("--store", store_dir, "store directory")->required();
  query_cmd->add_option("--key-file", key_file, "key file")->required();
  query_cmd->add_option("--filter", filter_expr,
                        "eq|lt|le|gt|ge V, or range [V,W] / (V,W)")
      ->required();
  query_cmd->add_flag("--count-only", count_only, "print only the row count");
  query_cmd->add_option("--workers", workers, "scan threads");
  query_cmd->add_option("--seed", seed, "deterministic randomness seed");

  auto* audit_cmd = app.add_subcommand("audit", "report leakage shape");
  audit_cmd->add_option("--store", store_dir, "store directory")->required();

  auto* bench_cmd = app.add_subcommand("bench", "random range query timing");
  bench_cmd->add_option("--store", store_dir, "store directory")->required();
  bench_cmd->add_option("--key-file", key_file, "key file")->required();
  bench_cmd->add_option("--queries", queries, "number of queries");
  bench_cmd->add_option("--range-size", range_size,
                        "consecutive distinct values per range");
  bench_cmd->add_option("--seed", seed, "deterministic randomness seed");
  bench_cmd->add_option("--workers", workers, "scan threads");

  auto* append_cmd = app.add_subcommand("append", "append a value");
  append_cmd->add_option("--store", store_dir, "store directory")->required();
  append_cmd->add_option("--key-file", key_file, "key file")->required();
  append_cmd->add_option("--value", value, "value to append")->required();
  append_cmd->add_option("--seed", seed, "deterministic randomness seed");

  auto* delete_cmd = app.add_subcommand("delete", "invalidate a row");
  delete_cmd->add_option("--store", store_dir, "store directory")->required();
  delete_cmd->add_option("--rid", rid, "row id")->required();
  delete_cmd->add_option("--which", which, "main or delta");
  delete_cmd->add_option("--seed", seed, "deterministic randomness seed");

  auto* merge_cmd = app.add_subcommand("merge", "fold the delta into main");
  merge_cmd->add_option("--store", store_dir, "store directory")->required();
  merge_cmd->add_option("--key-file", key_file, "key file")->required();
  merge_cmd->add_option("--seed", seed, "deterministic randomness seed");

  auto* keygen_cmd = app.add_subcommand("keygen", "generate a key file");
  keygen_cmd->add_option("--key-file", key_file, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build_cmd->parsed()) {
      return cmd_build(input, table, column, ed, bs_max, max_len, key_file,
                       seed, out);
    }
    if (query_cmd->parsed()) {
      return cmd_query(store_dir, key_file, filter_expr, count_only, workers,
                       seed);
    }
    if (audit_cmd->parsed()) {
      return cmd_audit(store_dir);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(store_dir, key_file, queries, range_size, seed,
                       workers);
    }
    if (append_cmd->parsed()) {
      return cmd_append(store_dir, key_file, value, seed);
    }
    if (delete_cmd->parsed()) {
      return cmd_delete(store_dir, rid, which, seed);
    }
    if (merge_cmd->parsed()) {
      return cmd_merge(store_dir, key_file, seed);
    }
    if (keygen_cmd->parsed()) {
      return cmd_keygen(key_file);
    }
  } catch (const AuthError& e) {
    std::cerr << "crypto error: " << e.what() << "\n";
    return kExitCryptoError;
  } catch (const AlphabetError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const LengthError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const VersionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const IndexError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
