#include "edict/engine.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "edict/errors.hpp"

namespace edict {

namespace {

// Scan [begin, end) of the attribute vector, appending matching row ids.
template <typename Match>
void scan_block(const AttributeVector& av, std::size_t begin, std::size_t end,
                const Match& match, std::vector<RecordId>& out) {
  for (std::size_t i = begin; i < end; ++i) {
    if (match(av.vids[i])) {
      out.push_back(static_cast<RecordId>(i));
    }
  }
}

template <typename Match>
std::vector<RecordId> parallel_scan(const AttributeVector& av,
                                    const Match& match, unsigned workers) {
  const std::size_t n = av.size();
  if (workers <= 1 || n < 4096) {
    std::vector<RecordId> out;
    scan_block(av, 0, n, match, out);
    return out;
  }
  const unsigned w = static_cast<unsigned>(
      std::min<std::size_t>(workers, (n + 4095) / 4096));
  std::vector<std::vector<RecordId>> parts(w);
  std::vector<std::thread> threads;
  threads.reserve(w);
  const std::size_t chunk = (n + w - 1) / w;
  for (unsigned t = 0; t < w; ++t) {
    const std::size_t begin = std::min<std::size_t>(t * chunk, n);
    const std::size_t end = std::min<std::size_t>(begin + chunk, n);
    threads.emplace_back([&, begin, end, t] {
      scan_block(av, begin, end, match, parts[t]);
    });
  }
  for (auto& th : threads) {
    th.join();
  }
  std::size_t total = 0;
  for (const auto& p : parts) {
    total += p.size();
  }
  std::vector<RecordId> out;
  out.reserve(total);
  for (const auto& p : parts) {
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace

std::vector<RecordId> av_search_range(const AttributeVector& av,
                                      const VidRange& first,
                                      const VidRange& second,
                                      unsigned workers) {
  // Dummy ranges have lo = hi = the all-ones marker, which no real ValueId
  // reaches, so they fall out of the comparison naturally.
  auto match = [&](ValueId vid) {
    return (vid >= first.lo && vid <= first.hi) ||
           (vid >= second.lo && vid <= second.hi);
  };
  return parallel_scan(av, match, workers);
}

std::vector<RecordId> av_search_set(const AttributeVector& av,
                                    const std::vector<ValueId>& vids,
                                    unsigned workers) {
  auto match = [&](ValueId vid) {
    return std::binary_search(vids.begin(), vids.end(), vid);
  };
  return parallel_scan(av, match, workers);
}

std::vector<RecordId> av_search(const AttributeVector& av,
                                const VidSelection& selection,
                                unsigned workers) {
  if (selection.is_ranges()) {
    return av_search_range(av, selection.first(), selection.second(), workers);
  }
  return av_search_set(av, selection.vids(), workers);
}

std::vector<EncryptedValue> reconstruct(
    const std::vector<EncryptedValue>& enc_dict, const AttributeVector& av,
    const std::vector<RecordId>& rids) {
  std::vector<EncryptedValue> out;
  out.reserve(rids.size());
  for (RecordId rid : rids) {
    if (rid >= av.size()) {
      throw IndexError("record id " + std::to_string(rid) +
                       " out of range for " + std::to_string(av.size()) +
                       " rows");
    }
    out.push_back(enc_dict[av.vids[rid]]);
  }
  return out;
}

LeakageReport leakage_profile(const EncodedColumnStore& store) {
  LeakageReport report;
  report.histogram.assign(store.dict_size(), 0);
  for (ValueId vid : store.av.vids) {
    ++report.histogram[vid];
  }
  if (!report.histogram.empty()) {
    report.max_count =
        *std::max_element(report.histogram.begin(), report.histogram.end());
    report.min_count =
        *std::min_element(report.histogram.begin(), report.histogram.end());
  }
  if (store.kind.is_plain()) {
    report.frequency_class = "plaintext";
    report.bound_ok = true;
  } else {
    switch (store.kind.repetition()) {
      case Repetition::kRevealing:
        report.frequency_class = "full";
        report.bound_ok = report.histogram.empty() || report.min_count >= 1;
        break;
      case Repetition::kSmoothing:
        report.frequency_class =
            "bounded <= " + std::to_string(store.bs_max.value_or(0));
        report.bound_ok = report.histogram.empty() ||
                          (report.min_count >= 1 &&
                           report.max_count <= store.bs_max.value_or(0));
        break;
      case Repetition::kHiding:
        report.frequency_class = "none (all counts = 1)";
        report.bound_ok = report.histogram.empty() ||
                          (report.min_count == 1 && report.max_count == 1);
        break;
    }
  }
  if (store.kind.is_plain()) {
    report.order_class = "plaintext sorted";
  } else {
    switch (store.kind.order()) {
      case Order::kSorted:
        report.order_class = "sorted";
        break;
      case Order::kRotated:
        report.order_class = "rotated";
        break;
      case Order::kUnsorted:
        report.order_class = "unsorted";
        break;
    }
  }
  return report;
}

std::vector<RecordId> server_search(const EncodedColumnStore& store,
                                    const Enclave& enclave,
                                    const EncryptedRangeToken& token,
                                    unsigned workers,
                                    SearchCounters* counters) {
  UntrustedLoader loader(store.enc_dict);
  EnclaveStats stats;
  // Single boundary crossing per query: the loader handle goes in once.
  const VidSelection selection =
      enclave.dict_search(store.kind, token, loader, store.enc_rnd_offset,
                          store.table_name, store.column_name, &stats);
  const auto scan_start = std::chrono::steady_clock::now();
  std::vector<RecordId> rids = av_search(store.av, selection, workers);
  const auto scan_end = std::chrono::steady_clock::now();
  if (counters != nullptr) {
    counters->enclave_loads = stats.loads;
    counters->enclave_held_peak = stats.held_peak;
    counters->scan_seconds =
        std::chrono::duration<double>(scan_end - scan_start).count();
  }
  return rids;
}

std::vector<RecordId> plain_search(const EncodedColumnStore& store,
                                   const SearchRange& range,
                                   unsigned workers) {
  if (!store.kind.is_plain()) {
    throw Error("plain_search requires a plaintext dictionary");
  }
  const auto& dict = store.enc_dict;
  const std::size_t n = dict.size();
  auto value_at = [&](std::size_t i) {
    return std::string_view(reinterpret_cast<const char*>(dict[i].body.data()),
                            dict[i].body.size());
  };
  std::size_t start = 0;
  if (range.lo_kind() == SearchRange::LoKind::kValue) {
    std::size_t lo = 0;
    std::size_t hi = n;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      const bool past = range.lo_inclusive() ? value_at(mid) >= range.lo()
                                             : value_at(mid) > range.lo();
      if (past) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    start = lo;
  }
  std::size_t past_end = n;
  if (range.hi_kind() == SearchRange::HiKind::kValue) {
    std::size_t lo = 0;
    std::size_t hi = n;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      const bool beyond = range.hi_inclusive() ? value_at(mid) > range.hi()
                                               : value_at(mid) >= range.hi();
      if (beyond) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    past_end = lo;
  }
  VidRange found{kDummyVid, kDummyVid};
  if (start < past_end) {
    found = {static_cast<ValueId>(start), static_cast<ValueId>(past_end - 1)};
  }
  return av_search_range(store.av, found, VidRange{}, workers);
}

}  // namespace edict
