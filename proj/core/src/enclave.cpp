#include "edict/enclave.hpp"

#include <functional>
#include <string>
#include <utility>

#include "edict/errors.hpp"
#include "edict/order_encoding.hpp"

namespace edict {

namespace {

// Tracks how many decrypted dictionary values the enclave holds at once.
// The searches keep this constant and small regardless of |eD|.
struct HoldTracker {
  std::uint32_t current = 0;
  std::uint32_t peak = 0;

  void inc() {
    ++current;
    if (current > peak) {
      peak = current;
    }
  }
  void dec() { --current; }
};

class HeldValue {
 public:
  HeldValue(std::string v, HoldTracker& t)
      : value_(std::move(v)), tracker_(&t) {
    tracker_->inc();
  }
  ~HeldValue() {
    if (tracker_ != nullptr) {
      tracker_->dec();
    }
  }
  HeldValue(const HeldValue&) = delete;
  HeldValue& operator=(const HeldValue&) = delete;
  HeldValue(HeldValue&& o) noexcept
      : value_(std::move(o.value_)), tracker_(o.tracker_) {
    o.tracker_ = nullptr;
  }
  HeldValue& operator=(HeldValue&&) = delete;

  const std::string& get() const { return value_; }

 private:
  std::string value_;
  HoldTracker* tracker_;
};

struct DecodedBound {
  std::uint8_t tag = kTagNegInf;
  std::string value;
};

DecodedBound parse_payload(const std::string& payload) {
  if (payload.empty()) {
    throw TokenError("token payload is empty");
  }
  DecodedBound b;
  b.tag = static_cast<std::uint8_t>(payload[0]);
  if (b.tag > kTagPosInf) {
    throw TokenError("unknown token tag byte");
  }
  if (b.tag == kTagInclusive || b.tag == kTagExclusive) {
    std::size_t end = payload.find('\0', 1);
    b.value = payload.substr(1, end == std::string::npos ? end : end - 1);
  }
  return b;
}

// Token contents after decryption, with lo > hi collapsed to "matches
// nothing" rather than an error so a degenerate token still gets a uniform
// answer.
struct DecodedRange {
  bool never = false;
  bool lo_unbounded = true;
  bool hi_unbounded = true;
  bool lo_inclusive = true;
  bool hi_inclusive = true;
  std::string lo;
  std::string hi;
  std::size_t max_len = 0;

  bool contains(std::string_view v) const {
    if (never) {
      return false;
    }
    if (!lo_unbounded && (lo_inclusive ? v < lo : v <= lo)) {
      return false;
    }
    if (!hi_unbounded && (hi_inclusive ? v > hi : v >= hi)) {
      return false;
    }
    return true;
  }
};

DecodedRange decode_token(const ColumnKey& key,
                          const EncryptedRangeToken& token) {
  const std::string lo_payload = pae_dec(key, token.lo);
  const std::string hi_payload = pae_dec(key, token.hi);
  if (lo_payload.size() != hi_payload.size() || lo_payload.empty()) {
    throw TokenError("token payload lengths are inconsistent");
  }
  DecodedBound lo = parse_payload(lo_payload);
  DecodedBound hi = parse_payload(hi_payload);
  if (lo.tag == kTagPosInf || hi.tag == kTagNegInf) {
    throw TokenError("token endpoint tags are swapped");
  }

  DecodedRange r;
  r.max_len = lo_payload.size() - 1;
  if (lo.tag != kTagNegInf) {
    r.lo_unbounded = false;
    r.lo_inclusive = lo.tag == kTagInclusive;
    r.lo = std::move(lo.value);
  }
  if (hi.tag != kTagPosInf) {
    r.hi_unbounded = false;
    r.hi_inclusive = hi.tag == kTagInclusive;
    r.hi = std::move(hi.value);
  }
  if (!r.lo_unbounded && !r.hi_unbounded && r.lo > r.hi) {
    r.never = true;
  }
  return r;
}

using ProbeFn = std::function<HeldValue(std::size_t)>;

// Leftmost index in [lo, hi) whose probe satisfies the predicate, or hi.
// Predicates must be monotone along the window.
std::size_t bisect(std::size_t lo, std::size_t hi,
                   const std::function<bool(std::size_t)>& pred) {
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

VidSelection search_sorted(UntrustedLoader& loader, const DecodedRange& r,
                           const ProbeFn& probe) {
  const std::size_t n = loader.size();
  if (n == 0 || r.never) {
    return VidSelection::none();
  }

  std::size_t start = 0;
  if (!r.lo_unbounded) {
    start = bisect(0, n, [&](std::size_t j) {
      HeldValue v = probe(j);
      return r.lo_inclusive ? v.get() >= r.lo : v.get() > r.lo;
    });
  }
  std::size_t past_end = n;
  if (!r.hi_unbounded) {
    past_end = bisect(0, n, [&](std::size_t j) {
      HeldValue v = probe(j);
      return r.hi_inclusive ? v.get() > r.hi : v.get() >= r.hi;
    });
  }
  if (start >= past_end) {
    return VidSelection::none();
  }
  return VidSelection::ranges({static_cast<ValueId>(start),
                               static_cast<ValueId>(past_end - 1)});
}

VidSelection search_unsorted(UntrustedLoader& loader, const DecodedRange& r,
                             const ProbeFn& probe) {
  // Full scan, unconditionally: the number of loads never depends on the
  // range contents.
  std::vector<ValueId> vids;
  for (std::size_t i = 0; i < loader.size(); ++i) {
    HeldValue v = probe(i);
    if (r.contains(v.get())) {
      vids.push_back(static_cast<ValueId>(i));
    }
  }
  return VidSelection::list(std::move(vids));
}

std::uint64_t parse_rotation_offset(const ColumnKey& key,
                                    const EncryptedValue& enc_rnd_offset,
                                    std::size_t dict_size) {
  const std::string bytes = pae_dec(key, enc_rnd_offset);
  if (bytes.size() != 8) {
    throw FormatError("rotation offset payload must be 8 bytes");
  }
  std::uint64_t offset = 0;
  for (char c : bytes) {
    offset = (offset << 8) | static_cast<std::uint8_t>(c);
  }
  if (dict_size > 0 && offset >= dict_size) {
    throw FormatError("rotation offset exceeds the dictionary size");
  }
  return offset;
}

VidSelection search_rotated(UntrustedLoader& loader, const DecodedRange& r,
                            const ColumnKey& key,
                            const std::optional<EncryptedValue>& enc_rnd_offset,
                            const ProbeFn& probe) {
  const std::size_t n = loader.size();
  if (n == 0) {
    return VidSelection::none();
  }
  if (!enc_rnd_offset.has_value()) {
    throw FormatError("rotated dictionary without an encrypted offset");
  }
  // The search is anchored at entry 0, so the offset value itself is not
  // consulted; decrypting it authenticates the store's rotation metadata.
  (void)parse_rotation_offset(key, *enc_rnd_offset, n);
  if (r.never) {
    return VidSelection::none();
  }

  const BigUint domain = domain_max(r.max_len);

  HeldValue anchor = probe(0);
  const BigUint anchor_enc = encode(anchor.get(), r.max_len);

  // Fold sentinels and open endpoints into a closed interval of encodings.
  BigUint lo_enc;
  if (!r.lo_unbounded) {
    lo_enc = encode(r.lo, r.max_len);
    if (!r.lo_inclusive) {
      lo_enc.add_word(1);
    }
  }
  BigUint hi_enc = domain;
  hi_enc.sub_word(1);
  if (!r.hi_unbounded) {
    hi_enc = encode(r.hi, r.max_len);
    if (!r.hi_inclusive) {
      if (hi_enc.is_zero()) {
        return VidSelection::none();
      }
      hi_enc.sub_word(1);
    }
  }
  if (lo_enc > hi_enc) {
    return VidSelection::none();
  }

  const bool anchor_matched = lo_enc <= anchor_enc && anchor_enc <= hi_enc;
  // The interval wraps the anchor when it covers the anchor but starts
  // strictly below it; the matching positions then split into a prefix and
  // a suffix of the rotated dictionary.
  const bool wrapped = anchor_matched && lo_enc < anchor_enc;

  if (n == 1) {
    return anchor_matched ? VidSelection::ranges({0, 0})
                          : VidSelection::none();
  }

  BigUint t_lo;
  BigUint t_hi;
  if (wrapped) {
    t_lo = domain;
    t_lo.sub(anchor_enc).add(lo_enc);
    t_hi = hi_enc;
    t_hi.sub(anchor_enc);
  } else {
    t_lo = mod_shift(lo_enc, anchor_enc, domain);
    t_hi = mod_shift(hi_enc, anchor_enc, domain);
  }

  auto shifted_key = [&](std::size_t j) {
    HeldValue v = probe(j);
    return mod_shift(encode(v.get(), r.max_len), anchor_enc, domain);
  };
  auto at_least = [&](const BigUint& t) {
    return [&, t](std::size_t j) { return shifted_key(j) >= t; };
  };
  auto greater = [&](const BigUint& t) {
    return [&, t](std::size_t j) { return shifted_key(j) > t; };
  };

  bool run_wraps;
  {
    HeldValue last = probe(n - 1);
    run_wraps = last.get() == anchor.get();
  }

  if (!run_wraps) {
    // Shifted encodings are nondecreasing across the whole dictionary.
    std::size_t s = bisect(0, n, at_least(t_lo));
    std::size_t past = bisect(0, n, greater(t_hi));
    if (wrapped) {
      VidRange low{0, static_cast<ValueId>(past - 1)};
      if (s == n) {
        return VidSelection::ranges(low);
      }
      return VidSelection::ranges(
          low, {static_cast<ValueId>(s), static_cast<ValueId>(n - 1)});
    }
    if (s >= past) {
      return VidSelection::none();
    }
    return VidSelection::ranges(
        {static_cast<ValueId>(s), static_cast<ValueId>(past - 1)});
  }

  // The rotation split a run of entries equal to the anchor value across
  // the array boundary, where their shifted encodings are ambiguous. Sweep
  // the run's extent from both ends, then search the clean middle.
  std::size_t front_end = 0;  // last front index equal to the anchor
  while (front_end + 1 < n) {
    HeldValue v = probe(front_end + 1);
    if (v.get() != anchor.get()) {
      break;
    }
    ++front_end;
  }
  if (front_end + 1 == n) {
    // Every entry holds the anchor value.
    return anchor_matched
               ? VidSelection::ranges({0, static_cast<ValueId>(n - 1)})
               : VidSelection::none();
  }
  std::size_t back_start = n - 1;  // first back index equal to the anchor
  while (back_start - 1 > front_end + 1) {
    HeldValue v = probe(back_start - 1);
    if (v.get() != anchor.get()) {
      break;
    }
    --back_start;
  }

  const std::size_t mid_lo = front_end + 1;
  std::size_t past_mid = bisect(mid_lo, back_start, greater(t_hi));

  if (wrapped) {
    // Anchor entries at both ends are matched; the middle prefix extends
    // the low range inward and the middle suffix the high one. past_mid ==
    // mid_lo collapses the low range to the front run alone, s_mid ==
    // back_start the high range to the back run alone.
    std::size_t s_mid = bisect(mid_lo, back_start, at_least(t_lo));
    return VidSelection::ranges(
        {0, static_cast<ValueId>(past_mid - 1)},
        {static_cast<ValueId>(s_mid), static_cast<ValueId>(n - 1)});
  }
  if (anchor_matched) {
    // The interval starts exactly at the anchor value: both runs and the
    // middle prefix up to the interval end are matched.
    return VidSelection::ranges(
        {0, static_cast<ValueId>(past_mid - 1)},
        {static_cast<ValueId>(back_start), static_cast<ValueId>(n - 1)});
  }
  std::size_t s_mid = bisect(mid_lo, back_start, at_least(t_lo));
  if (s_mid >= past_mid) {
    return VidSelection::none();
  }
  return VidSelection::ranges(
      {static_cast<ValueId>(s_mid), static_cast<ValueId>(past_mid - 1)});
}

}  // namespace

VidSelection Enclave::dict_search(
    EdKind kind, const EncryptedRangeToken& token, UntrustedLoader& loader,
    const std::optional<EncryptedValue>& enc_rnd_offset,
    std::string_view table_name, std::string_view column_name,
    EnclaveStats* stats) const {
  if (kind.is_plain()) {
    throw Error("plaintext dictionaries are searched outside the enclave");
  }
  const std::uint64_t loads_before = loader.load_count();
  const ColumnKey key = derive_key(master_, table_name, column_name);
  const DecodedRange range = decode_token(key, token);

  HoldTracker tracker;
  ProbeFn probe = [&](std::size_t j) {
    return HeldValue(pae_dec(key, loader.load(j)), tracker);
  };

  VidSelection selection = [&] {
    switch (kind.order()) {
      case Order::kSorted:
        return search_sorted(loader, range, probe);
      case Order::kRotated:
        return search_rotated(loader, range, key, enc_rnd_offset, probe);
      case Order::kUnsorted:
        return search_unsorted(loader, range, probe);
    }
    throw Error("unreachable dictionary order");
  }();

  if (stats != nullptr) {
    stats->loads = loader.load_count() - loads_before;
    stats->held_peak = tracker.peak;
  }
  return selection;
}

EncryptedValue Enclave::reencrypt(std::string_view table_name,
                                  std::string_view column_name,
                                  const EncryptedValue& incoming,
                                  Rng& rng) const {
  const ColumnKey key = derive_key(master_, table_name, column_name);
  return pae_enc(key, rng, pae_dec(key, incoming));
}

std::int64_t Enclave::modular_bound_search(UntrustedLoader& loader,
                                           std::string_view search_value,
                                           std::string_view table_name,
                                           std::string_view column_name,
                                           ProbeSide side,
                                           std::size_t max_len) const {
  const ColumnKey key = derive_key(master_, table_name, column_name);
  const std::size_t n = loader.size();
  if (n == 0) {
    return side == ProbeSide::kStart ? 0 : -1;
  }
  HoldTracker tracker;
  const BigUint domain = domain_max(max_len);
  BigUint anchor_enc;
  {
    HeldValue anchor(pae_dec(key, loader.load(0)), tracker);
    anchor_enc = encode(anchor.get(), max_len);
  }
  const BigUint target =
      mod_shift(encode(search_value, max_len), anchor_enc, domain);

  std::size_t result = bisect(0, n, [&](std::size_t j) {
    HeldValue v(pae_dec(key, loader.load(j)), tracker);
    const BigUint k = mod_shift(encode(v.get(), max_len), anchor_enc, domain);
    return side == ProbeSide::kStart ? k >= target : k > target;
  });
  if (side == ProbeSide::kStart) {
    return static_cast<std::int64_t>(result);
  }
  return static_cast<std::int64_t>(result) - 1;
}

}  // namespace edict
