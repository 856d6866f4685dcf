#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>
#include <string>
#include <vector>

#include "edict/builder.hpp"
#include "edict/enclave.hpp"
#include "edict/errors.hpp"
#include "edict/order_encoding.hpp"
#include "support/helpers.hpp"

using namespace edict;
using namespace edict::test;

namespace {

const MasterKey kMk = test_master_key();

// All closed ranges over single characters in [lo_char, hi_char], plus the
// unbounded range.
std::vector<SearchRange> all_closed_char_ranges(char lo_char, char hi_char) {
  std::vector<SearchRange> out;
  for (char a = lo_char; a <= hi_char; ++a) {
    for (char b = a; b <= hi_char; ++b) {
      out.push_back(SearchRange::closed(std::string(1, a), std::string(1, b)));
    }
  }
  out.push_back(SearchRange::all());
  return out;
}

std::uint64_t sorted_load_budget(std::size_t dict_size) {
  std::uint64_t bits = 0;
  while ((1ull << bits) < dict_size) {
    ++bits;
  }
  return 2 * (bits + 2);
}

}  // namespace

TEST_SUITE("enclave") {

TEST_CASE("sorted dictionary search on the name sample") {
  Rng rng(31);
  EncodedColumnStore store =
      build(sample_names_column(), BuildParams{EdKind::ed(1), {}}, kMk, "t",
            "c", rng);
  // Dictionary after sorting: Archie, Hans, Jessica.
  VidSelection sel =
      enclave_search(store, SearchRange::closed("Archie", "Hans"), kMk, rng);
  REQUIRE(sel.is_ranges());
  CHECK(sel.first() == VidRange{0, 1});
  CHECK(sel.second().is_dummy());

  VidSelection above =
      enclave_search(store, SearchRange::closed("Karl", "Zoe"), kMk, rng);
  CHECK(above.empty());
}

TEST_CASE("sorted search boundaries with duplicate entries") {
  // Dictionary (A, B, B, C) via a frequency-hiding build of (A,B,B,C).
  Rng rng(32);
  PlainColumn col(std::vector<std::string>{"A", "B", "B", "C"});
  EncodedColumnStore store =
      build(col, BuildParams{EdKind::ed(7), {}}, kMk, "t", "c", rng);
  REQUIRE(decrypt_dictionary(store, kMk) ==
          std::vector<std::string>{"A", "B", "B", "C"});

  auto sel = enclave_search(store, SearchRange::closed("B", "B"), kMk, rng);
  CHECK(sel.first() == VidRange{1, 2});
  sel = enclave_search(store, SearchRange::closed("A", "C"), kMk, rng);
  CHECK(sel.first() == VidRange{0, 3});
  sel = enclave_search(store, SearchRange::closed("D", "E"), kMk, rng);
  CHECK(sel.empty());
}

TEST_CASE("unsorted dictionary scan matches the published example") {
  // The dictionary in original column order: Hans, Jessica, Archie.
  Rng rng(33);
  EncodedColumnStore store = make_store_raw(
      EdKind::ed(3), {"Hans", "Jessica", "Archie"}, {1, 2, 1, 1, 0, 2}, 7,
      std::nullopt, kMk, rng);
  VidSelection sel =
      enclave_search(store, SearchRange::closed("Archie", "Hans"), kMk, rng);
  REQUIRE_FALSE(sel.is_ranges());
  CHECK(sel.vids() == std::vector<ValueId>{0, 2});

  SUBCASE("empty dictionary yields an empty list") {
    EncodedColumnStore empty = make_store_raw(EdKind::ed(3), {}, {}, 7,
                                              std::nullopt, kMk, rng);
    CHECK(enclave_search(empty, SearchRange::all(), kMk, rng).vids().empty());
  }
  SUBCASE("unbounded range lists every entry") {
    VidSelection all = enclave_search(store, SearchRange::all(), kMk, rng);
    CHECK(all.vids() == std::vector<ValueId>{0, 1, 2});
  }
  SUBCASE("the scan always loads every entry") {
    EnclaveStats stats;
    enclave_search(store, SearchRange::closed("zzz", "zzzz"), kMk, rng,
                   &stats);
    CHECK(stats.loads == store.dict_size());
  }
}

TEST_CASE("rotated search on a rotation by three") {
  // Sorted (A, B, C, D) rotated by 3 gives (B, C, D, A).
  Rng rng(34);
  EncodedColumnStore store =
      make_store_raw(EdKind::ed(2), {"B", "C", "D", "A"}, {}, 1, 3, kMk, rng);
  VidSelection sel =
      enclave_search(store, SearchRange::closed("A", "B"), kMk, rng);
  REQUIRE(sel.is_ranges());
  CHECK(sel.first() == VidRange{0, 0});
  CHECK(sel.second() == VidRange{3, 3});

  SUBCASE("full domain covers all positions") {
    VidSelection all = enclave_search(store, SearchRange::all(), kMk, rng);
    CHECK(selection_positions(all, 4) == std::set<std::uint32_t>{0, 1, 2, 3});
  }
  SUBCASE("range strictly above every value is empty") {
    CHECK(enclave_search(store, SearchRange::closed("E", "F"), kMk, rng)
              .empty());
  }
}

TEST_CASE("zero rotation behaves exactly like the sorted search") {
  Rng rng(35);
  const std::vector<std::string> sorted{"A", "C", "F", "H", "K"};
  EncodedColumnStore rotated =
      make_store_raw(EdKind::ed(2), sorted, {}, 1, 0, kMk, rng);
  EncodedColumnStore plain_sorted =
      make_store_raw(EdKind::ed(1), sorted, {}, 1, std::nullopt, kMk, rng);
  for (const SearchRange& r : all_closed_char_ranges('A' - 1, 'L')) {
    CHECK(selection_positions(enclave_search(rotated, r, kMk, rng), 5) ==
          selection_positions(enclave_search(plain_sorted, r, kMk, rng), 5));
  }
}

TEST_CASE("rotated search, exhaustively over small distinct dictionaries") {
  Rng rng(36);
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<std::string> sorted;
    for (std::size_t i = 0; i < n; ++i) {
      sorted.push_back(std::string(1, static_cast<char>('B' + 2 * i)));
    }
    for (std::size_t offset = 0; offset < n; ++offset) {
      std::vector<std::string> dict(n);
      for (std::size_t j = 0; j < n; ++j) {
        dict[(j + offset) % n] = sorted[j];
      }
      EncodedColumnStore store =
          make_store_raw(EdKind::ed(2), dict, {}, 1, offset, kMk, rng);
      for (const SearchRange& r : all_closed_char_ranges('A', 'O')) {
        CHECK(selection_positions(enclave_search(store, r, kMk, rng), n) ==
              oracle_matching_positions(dict, r));
      }
    }
  }
}

TEST_CASE("rotated search when the rotation splits a duplicate run") {
  Rng rng(37);
  // Sorted (A, A, B, C) rotated by 3: (A, B, C, A) splits the A run.
  EncodedColumnStore store =
      make_store_raw(EdKind::ed(5), {"A", "B", "C", "A"}, {}, 1, 3, kMk, rng,
                     2);
  const std::vector<std::string> dict{"A", "B", "C", "A"};
  for (const SearchRange& r : all_closed_char_ranges('A' - 1, 'D')) {
    CHECK(selection_positions(enclave_search(store, r, kMk, rng), 4) ==
          oracle_matching_positions(dict, r));
  }

  SUBCASE("all entries equal") {
    EncodedColumnStore all_equal = make_store_raw(
        EdKind::ed(8), {"X", "X", "X", "X"}, {}, 1, 2, kMk, rng, std::nullopt);
    CHECK(selection_positions(
              enclave_search(all_equal, SearchRange::equals("X"), kMk, rng),
              4) == std::set<std::uint32_t>{0, 1, 2, 3});
    CHECK(enclave_search(all_equal, SearchRange::equals("Y"), kMk, rng)
              .empty());
  }
}

TEST_CASE("rotated search with duplicates, exhaustively over multisets") {
  // Every multiset over {A, B, C} of size <= 5, every rotation offset,
  // every closed one-character range.
  Rng rng(38);
  const std::string alphabet = "ABC";
  // Odometer enumeration of nondecreasing tuples = multisets.
  std::vector<std::vector<std::string>> cases;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
      if (std::is_sorted(idx.begin(), idx.end())) {
        std::vector<std::string> sorted;
        for (std::size_t i : idx) {
          sorted.push_back(std::string(1, alphabet[i]));
        }
        cases.push_back(std::move(sorted));
      }
      std::size_t k = 0;
      while (k < n && ++idx[k] == alphabet.size()) {
        idx[k++] = 0;
      }
      if (k == n) {
        break;
      }
    }
  }
  const auto ranges = all_closed_char_ranges('A' - 1, 'D');
  for (const auto& sorted : cases) {
    const std::size_t n = sorted.size();
    for (std::size_t offset = 0; offset < n; ++offset) {
      std::vector<std::string> dict(n);
      for (std::size_t j = 0; j < n; ++j) {
        dict[(j + offset) % n] = sorted[j];
      }
      EncodedColumnStore store =
          make_store_raw(EdKind::ed(8), dict, {}, 1, offset, kMk, rng);
      for (const SearchRange& r : ranges) {
        CHECK(selection_positions(enclave_search(store, r, kMk, rng), n) ==
              oracle_matching_positions(dict, r));
      }
    }
  }
}

TEST_CASE("modular bound search") {
  Rng rng(39);
  EncodedColumnStore store =
      make_store_raw(EdKind::ed(2), {"B", "C", "D", "A"}, {}, 1, 3, kMk, rng);
  const Enclave enclave(kMk);

  SUBCASE("start lands on the first match in rotated order") {
    UntrustedLoader loader(store.enc_dict);
    CHECK(enclave.modular_bound_search(loader, "C", "t", "c",
                                       Enclave::ProbeSide::kStart, 1) == 1);
  }
  SUBCASE("a value below the anchor wraps to the high positions") {
    // In anchor-relative order (B, C, D, A), the value A sits last.
    UntrustedLoader loader(store.enc_dict);
    CHECK(enclave.modular_bound_search(loader, "A", "t", "c",
                                       Enclave::ProbeSide::kStart, 1) == 3);
  }
  SUBCASE("single entry dictionaries") {
    EncodedColumnStore one =
        make_store_raw(EdKind::ed(2), {"M"}, {}, 1, 0, kMk, rng);
    UntrustedLoader l1(one.enc_dict);
    CHECK(enclave.modular_bound_search(l1, "M", "t", "c",
                                       Enclave::ProbeSide::kStart, 1) == 0);
    UntrustedLoader l2(one.enc_dict);
    CHECK(enclave.modular_bound_search(l2, "Q", "t", "c",
                                       Enclave::ProbeSide::kStart, 1) == 1);
    UntrustedLoader l3(one.enc_dict);
    CHECK(enclave.modular_bound_search(l3, "M", "t", "c",
                                       Enclave::ProbeSide::kEnd, 1) == 0);
  }
  SUBCASE("agrees with a direct scan over every tiny dictionary") {
    // All distinct one-character dictionaries of size <= 4 over A..D, all
    // rotations, both probe sides.
    const std::string chars = "ABCD";
    for (std::size_t n = 1; n <= 4; ++n) {
      std::vector<bool> take(chars.size(), false);
      std::fill(take.begin(), take.begin() + n, true);
      std::sort(take.begin(), take.end());
      do {
        std::vector<std::string> sorted;
        for (std::size_t i = 0; i < chars.size(); ++i) {
          if (take[i]) {
            sorted.push_back(std::string(1, chars[i]));
          }
        }
        if (sorted.size() != n) {
          continue;
        }
        for (std::size_t offset = 0; offset < n; ++offset) {
          std::vector<std::string> dict(n);
          for (std::size_t j = 0; j < n; ++j) {
            dict[(j + offset) % n] = sorted[j];
          }
          EncodedColumnStore st =
              make_store_raw(EdKind::ed(2), dict, {}, 1, offset, kMk, rng);
          const BigUint dom = domain_max(1);
          const BigUint anchor = encode(dict[0], 1);
          for (char c = 'A' - 1; c <= 'E'; ++c) {
            const std::string value(1, c);
            if (value[0] < kAlphabetLo) {
              continue;
            }
            const BigUint target =
                mod_shift(encode(value, 1), anchor, dom);
            std::int64_t expect_start = static_cast<std::int64_t>(n);
            for (std::size_t i = 0; i < n; ++i) {
              if (mod_shift(encode(dict[i], 1), anchor, dom) >= target) {
                expect_start = static_cast<std::int64_t>(i);
                break;
              }
            }
            std::int64_t expect_end = -1;
            for (std::size_t i = 0; i < n; ++i) {
              if (mod_shift(encode(dict[i], 1), anchor, dom) <= target) {
                expect_end = static_cast<std::int64_t>(i);
              } else {
                break;
              }
            }
            UntrustedLoader ls(st.enc_dict);
            CHECK(enclave.modular_bound_search(
                      ls, value, "t", "c", Enclave::ProbeSide::kStart, 1) ==
                  expect_start);
            UntrustedLoader le(st.enc_dict);
            CHECK(enclave.modular_bound_search(
                      le, value, "t", "c", Enclave::ProbeSide::kEnd, 1) ==
                  expect_end);
          }
        }
      } while (std::next_permutation(take.begin(), take.end()));
    }
  }
}

TEST_CASE("authentication and token validation") {
  Rng rng(40);
  EncodedColumnStore store =
      build(sample_names_column(), BuildParams{EdKind::ed(1), {}}, kMk, "t",
            "c", rng);
  const Enclave enclave(kMk);

  SUBCASE("token under the wrong column name fails authentication") {
    EncryptedRangeToken token = encrypt_range(
        kMk, "t", "other_column", SearchRange::all(), store.max_len, rng);
    UntrustedLoader loader(store.enc_dict);
    CHECK_THROWS_AS(enclave.dict_search(store.kind, token, loader,
                                        store.enc_rnd_offset, "t", "c"),
                    AuthError);
  }
  SUBCASE("tampered dictionary entry fails during the search") {
    // A scanning store decrypts every entry, so any flipped byte is hit.
    EncodedColumnStore bad =
        build(sample_names_column(), BuildParams{EdKind::ed(3), {}}, kMk,
              "t", "c", rng);
    bad.enc_dict[1].body[0] ^= 0x01;
    CHECK_THROWS_AS(enclave_search(bad, SearchRange::all(), kMk, rng),
                    AuthError);
    // The sorted search hits tampering on the entries it probes.
    EncodedColumnStore bad_sorted = store;
    bad_sorted.enc_dict[1].body[0] ^= 0x01;
    CHECK_THROWS_AS(
        enclave_search(bad_sorted, SearchRange::closed("A", "Z"), kMk, rng),
        AuthError);
  }
  SUBCASE("malformed tag byte") {
    const ColumnKey key = derive_key(kMk, "t", "c");
    EncryptedRangeToken token;
    std::string payload(1 + store.max_len, '\0');
    payload[0] = '\x7f';
    token.lo = pae_enc(key, rng, payload);
    token.hi = pae_enc(key, rng, payload);
    UntrustedLoader loader(store.enc_dict);
    CHECK_THROWS_AS(enclave.dict_search(store.kind, token, loader,
                                        store.enc_rnd_offset, "t", "c"),
                    TokenError);
  }
  SUBCASE("swapped sentinel tags") {
    const ColumnKey key = derive_key(kMk, "t", "c");
    EncryptedRangeToken token;
    std::string lo_payload(1 + store.max_len, '\0');
    lo_payload[0] = static_cast<char>(kTagPosInf);
    std::string hi_payload(1 + store.max_len, '\0');
    token.lo = pae_enc(key, rng, lo_payload);
    token.hi = pae_enc(key, rng, hi_payload);
    UntrustedLoader loader(store.enc_dict);
    CHECK_THROWS_AS(enclave.dict_search(store.kind, token, loader,
                                        store.enc_rnd_offset, "t", "c"),
                    TokenError);
  }
  SUBCASE("rotated store with a truncated offset ciphertext") {
    Rng r2(41);
    EncodedColumnStore rot =
        make_store_raw(EdKind::ed(2), {"A", "B"}, {}, 1, 0, kMk, r2);
    const ColumnKey key = derive_key(kMk, "t", "c");
    rot.enc_rnd_offset = pae_enc(key, r2, "shrt");
    CHECK_THROWS_AS(enclave_search(rot, SearchRange::all(), kMk, r2),
                    FormatError);
  }
}

TEST_CASE("load complexity and constant memory") {
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + rng.uniform(120);
    std::vector<std::string> values;
    for (std::size_t i = 0; i < rows; ++i) {
      std::string v;
      const std::size_t len = 1 + rng.uniform(3);
      for (std::size_t j = 0; j < len; ++j) {
        v.push_back(static_cast<char>('a' + rng.uniform(4)));
      }
      values.push_back(std::move(v));
    }
    PlainColumn col(std::move(values), 3);
    const int kind_num = 1 + static_cast<int>(rng.uniform(9));
    BuildParams params{EdKind::ed(kind_num), {}};
    if (params.kind.repetition() == Repetition::kSmoothing) {
      params.bs_max = static_cast<std::uint32_t>(1 + rng.uniform(4));
    }
    EncodedColumnStore store = build(col, params, kMk, "t", "c", rng);
    const std::vector<std::string> dict = decrypt_dictionary(store, kMk);

    const std::string lo(1, static_cast<char>('a' + rng.uniform(4)));
    const std::string hi =
        std::string(1, static_cast<char>(lo[0] + rng.uniform(3))) + "zz";
    const SearchRange r = SearchRange::closed(lo, hi);

    EnclaveStats stats;
    VidSelection sel = enclave_search(store, r, kMk, rng, &stats);
    CHECK(selection_positions(sel, dict.size()) ==
          oracle_matching_positions(dict, r));
    CHECK(stats.held_peak <= 4);

    const std::size_t n = store.dict_size();
    if (params.kind.order() == Order::kUnsorted) {
      CHECK(stats.loads == n);
    } else if (params.kind.order() == Order::kSorted) {
      CHECK(stats.loads <= sorted_load_budget(n));
    } else if (n >= 2) {
      // The strict budget holds whenever the rotation does not split a
      // run of equal values across the array boundary; a split run adds
      // its own length in boundary probes.
      const ColumnKey key = derive_key(kMk, "t", "c");
      std::string anchor = pae_dec(key, store.enc_dict[0]);
      std::string last = pae_dec(key, store.enc_dict[n - 1]);
      if (anchor != last) {
        CHECK(stats.loads <= sorted_load_budget(n));
      } else {
        std::size_t run = 2;
        for (std::size_t i = 1; i < n && pae_dec(key, store.enc_dict[i]) ==
                                             anchor;
             ++i) {
          ++run;
        }
        for (std::size_t i = n - 2;
             i > 0 && pae_dec(key, store.enc_dict[i]) == anchor; --i) {
          ++run;
        }
        CHECK(stats.loads <= sorted_load_budget(n) + run);
      }
    }
  }
}

TEST_CASE("rotated stores with forced run splits, randomized") {
  // Multi-character values, duplicate-heavy multisets, rotations chosen so
  // the boundary lands inside a run, and every bound shape.
  Rng rng(44);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + rng.uniform(24);
    const std::size_t max_len = 1 + rng.uniform(4);
    std::vector<std::string> sorted;
    std::string current;
    for (std::size_t i = 0; i < n; ++i) {
      if (sorted.empty() || rng.uniform(3) == 0) {
        current.clear();
        const std::size_t len = rng.uniform(max_len + 1);
        for (std::size_t j = 0; j < len; ++j) {
          current.push_back(static_cast<char>('c' + rng.uniform(4)));
        }
      }
      sorted.push_back(current);
    }
    std::sort(sorted.begin(), sorted.end());
    const std::size_t offset = rng.uniform(n);
    std::vector<std::string> dict(n);
    for (std::size_t j = 0; j < n; ++j) {
      dict[(j + offset) % n] = sorted[j];
    }
    EncodedColumnStore store =
        make_store_raw(EdKind::ed(8), dict, {}, max_len, offset, kMk, rng);

    for (int q = 0; q < 6; ++q) {
      auto random_value = [&] {
        std::string v;
        const std::size_t len = rng.uniform(max_len + 1);
        for (std::size_t j = 0; j < len; ++j) {
          v.push_back(static_cast<char>('b' + rng.uniform(6)));
        }
        return v;
      };
      std::string a = random_value();
      std::string b = random_value();
      if (a > b) {
        std::swap(a, b);
      }
      SearchRange r = SearchRange::all();
      switch (rng.uniform(5)) {
        case 0:
          r = SearchRange::closed(a, b);
          break;
        case 1:
          r = SearchRange::interval(a, false, b, true);
          break;
        case 2:
          r = SearchRange::interval(a, true, b, false);
          break;
        case 3:
          r = SearchRange::less_than(b, rng.uniform(2) == 0);
          break;
        case 4:
          r = SearchRange::greater_than(a, rng.uniform(2) == 0);
          break;
      }
      EnclaveStats stats;
      const VidSelection sel = enclave_search(store, r, kMk, rng, &stats);
      CHECK(stats.held_peak <= 4);
      CHECK(selection_positions(sel, n) == oracle_matching_positions(dict, r));
    }
  }
}

TEST_CASE("concurrent queries against one store agree") {
  Rng rng(45);
  std::vector<std::string> values;
  for (int i = 0; i < 400; ++i) {
    values.push_back(std::string(1, static_cast<char>('a' + rng.uniform(8))) +
                     std::string(1, static_cast<char>('a' + rng.uniform(8))));
  }
  PlainColumn col(std::move(values), 2);
  EncodedColumnStore store =
      build(col, BuildParams{EdKind::ed(5), 3}, kMk, "t", "c", rng);
  const SearchRange r = SearchRange::closed("ba", "fz");
  Rng seq_rng(46);
  const QueryResult expect = run_query(store, r, kMk, seq_rng);

  std::vector<std::thread> threads;
  std::vector<QueryResult> results(8);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      Rng thread_rng(100 + t);
      results[t] = run_query(store, r, kMk, thread_rng);
    });
  }
  for (auto& th : threads) {
    th.join();
  }
  for (const auto& result : results) {
    CHECK(result.rids == expect.rids);
    CHECK(result.values == expect.values);
  }
}

TEST_CASE("empty stores are searchable") {
  Rng rng(43);
  for (int kind : {1, 2, 3, 7, 9}) {
    EncodedColumnStore store = make_store_raw(
        EdKind::ed(kind), {}, {}, 4,
        EdKind::ed(kind).order() == Order::kRotated
            ? std::optional<std::uint64_t>(0)
            : std::nullopt,
        kMk, rng);
    CHECK(enclave_search(store, SearchRange::all(), kMk, rng).empty());
  }
}

}  // TEST_SUITE
