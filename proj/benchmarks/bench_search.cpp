#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "edict/builder.hpp"
#include "edict/crypto.hpp"
#include "edict/engine.hpp"
#include "edict/order_encoding.hpp"
#include "edict/proxy.hpp"

namespace {

using namespace edict;

MasterKey bench_key() {
  MasterKey mk;
  mk.bytes.fill(0x5C);
  return mk;
}

PlainColumn distinct_column(std::size_t n) {
  std::vector<std::string> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "v%08zx", i);
    values.emplace_back(buf);
  }
  return PlainColumn(std::move(values), 10);
}

EncodedColumnStore bench_store(int kind, std::size_t n) {
  Rng rng(n * 31 + kind);
  BuildParams params{EdKind::ed(kind), {}};
  if (params.kind.repetition() == Repetition::kSmoothing) {
    params.bs_max = 10;
  }
  return build(distinct_column(n), params, bench_key(), "bench", "col", rng);
}

void BM_DictSearch(benchmark::State& state, int kind) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  EncodedColumnStore store = bench_store(kind, n);
  Rng rng(7);
  const MasterKey mk = bench_key();
  const Enclave enclave(mk);
  const EncryptedRangeToken token = encrypt_range(
      mk, "bench", "col", SearchRange::closed("v00000010", "v00000080"),
      store.max_len, rng);
  for (auto _ : state) {
    UntrustedLoader loader(store.enc_dict);
    auto sel = enclave.dict_search(store.kind, token, loader,
                                   store.enc_rnd_offset, "bench", "col");
    benchmark::DoNotOptimize(sel);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}

void BM_AvScan(benchmark::State& state) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  const unsigned workers = static_cast<unsigned>(state.range(1));
  Rng rng(3);
  AttributeVector av;
  av.vids.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    av.vids.push_back(static_cast<ValueId>(rng.uniform(1 << 16)));
  }
  for (auto _ : state) {
    auto rids = av_search_range(av, {100, 5000}, VidRange{}, workers);
    benchmark::DoNotOptimize(rids);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<benchmark::IterationCount>(rows));
}

void BM_Encode(benchmark::State& state) {
  const std::size_t max_len = static_cast<std::size_t>(state.range(0));
  const std::string value(max_len / 2, 'q');
  for (auto _ : state) {
    auto e = encode(value, max_len);
    benchmark::DoNotOptimize(e);
  }
}

void BM_PaeRoundTrip(benchmark::State& state) {
  Rng rng(11);
  const ColumnKey key = derive_key(bench_key(), "bench", "col");
  const std::string value(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) {
    EncryptedValue c = pae_enc(key, rng, value);
    auto v = pae_dec(key, c);
    benchmark::DoNotOptimize(v);
  }
}

BENCHMARK_CAPTURE(BM_DictSearch, sorted, 1)
    ->RangeMultiplier(16)
    ->Range(1 << 10, 1 << 18)
    ->Complexity(benchmark::oLogN);
BENCHMARK_CAPTURE(BM_DictSearch, rotated, 2)
    ->RangeMultiplier(16)
    ->Range(1 << 10, 1 << 18)
    ->Complexity(benchmark::oLogN);
BENCHMARK_CAPTURE(BM_DictSearch, unsorted, 3)
    ->RangeMultiplier(16)
    ->Range(1 << 10, 1 << 16)
    ->Complexity(benchmark::oN);
BENCHMARK(BM_AvScan)
    ->Args({1 << 20, 1})
    ->Args({1 << 20, 2})
    ->Args({1 << 20, 4});
BENCHMARK(BM_Encode)->Arg(10)->Arg(100);
BENCHMARK(BM_PaeRoundTrip)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
