#include "edict/types.hpp"

#include <algorithm>

#include "edict/errors.hpp"

namespace edict {

namespace {

std::size_t longest_value(const std::vector<std::string>& values) {
  std::size_t n = 0;
  for (const auto& v : values) {
    n = std::max(n, v.size());
  }
  return n;
}

}  // namespace

PlainColumn::PlainColumn(std::vector<std::string> values)
    : values_(std::move(values)), max_len_(longest_value(values_)) {
  if (values_.size() > kMaxRows) {
    throw LengthError("column exceeds the supported row count");
  }
}

PlainColumn::PlainColumn(std::vector<std::string> values, std::size_t max_len)
    : values_(std::move(values)), max_len_(max_len) {
  if (values_.size() > kMaxRows) {
    throw LengthError("column exceeds the supported row count");
  }
  for (const auto& v : values_) {
    if (v.size() > max_len_) {
      throw LengthError("value of length " + std::to_string(v.size()) +
                        " exceeds the column maximum of " +
                        std::to_string(max_len_));
    }
  }
}

EdKind EdKind::ed(int number) {
  if (number < 1 || number > 9) {
    throw FormatError("encrypted dictionary number must be in 1..9");
  }
  return EdKind(number);
}

EdKind EdKind::of(Repetition rep, Order order) {
  return EdKind(1 + 3 * static_cast<int>(rep) + static_cast<int>(order));
}

Repetition EdKind::repetition() const {
  if (code_ == 0) {
    return Repetition::kRevealing;
  }
  return static_cast<Repetition>((code_ - 1) / 3);
}

Order EdKind::order() const {
  if (code_ == 0) {
    return Order::kSorted;
  }
  return static_cast<Order>((code_ - 1) % 3);
}

std::string EdKind::name() const {
  if (code_ == 0) {
    return "plain";
  }
  return "ed" + std::to_string(code_);
}

SearchRange SearchRange::all() {
  return SearchRange{};
}

SearchRange SearchRange::equals(std::string v) {
  SearchRange r;
  r.lo_kind_ = LoKind::kValue;
  r.hi_kind_ = HiKind::kValue;
  r.lo_ = v;
  r.hi_ = std::move(v);
  return r;
}

SearchRange SearchRange::closed(std::string lo, std::string hi) {
  return interval(std::move(lo), true, std::move(hi), true);
}

SearchRange SearchRange::interval(std::string lo, bool lo_inclusive,
                                  std::string hi, bool hi_inclusive) {
  if (lo > hi) {
    throw ParseError("range lower bound exceeds upper bound");
  }
  SearchRange r;
  r.lo_kind_ = LoKind::kValue;
  r.hi_kind_ = HiKind::kValue;
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  r.lo_inclusive_ = lo_inclusive;
  r.hi_inclusive_ = hi_inclusive;
  return r;
}

SearchRange SearchRange::less_than(std::string hi, bool inclusive) {
  SearchRange r;
  r.hi_kind_ = HiKind::kValue;
  r.hi_ = std::move(hi);
  r.hi_inclusive_ = inclusive;
  return r;
}

SearchRange SearchRange::greater_than(std::string lo, bool inclusive) {
  SearchRange r;
  r.lo_kind_ = LoKind::kValue;
  r.lo_ = std::move(lo);
  r.lo_inclusive_ = inclusive;
  return r;
}

bool SearchRange::contains(std::string_view v) const {
  if (lo_kind_ == LoKind::kValue) {
    if (lo_inclusive_ ? v < lo_ : v <= lo_) {
      return false;
    }
  }
  if (hi_kind_ == HiKind::kValue) {
    if (hi_inclusive_ ? v > hi_ : v >= hi_) {
      return false;
    }
  }
  return true;
}

void EncodedColumnStore::validate() const {
  if (enc_rnd_offset.has_value() != (kind.order() == Order::kRotated &&
                                     !kind.is_plain())) {
    throw FormatError("enc_rnd_offset present iff the dictionary is rotated");
  }
  if (bs_max.has_value() !=
      (!kind.is_plain() && kind.repetition() == Repetition::kSmoothing)) {
    throw FormatError("bs_max present iff the dictionary smooths frequencies");
  }
  if (bs_max.has_value() && *bs_max == 0) {
    throw FormatError("bs_max must be positive");
  }
  if (av.size() > kMaxRows) {
    throw FormatError("row count exceeds the supported maximum");
  }
  for (ValueId vid : av.vids) {
    if (vid >= enc_dict.size()) {
      throw FormatError("attribute vector entry exceeds dictionary size");
    }
  }
  if (!kind.is_plain()) {
    switch (kind.repetition()) {
      case Repetition::kRevealing:
        break;  // |eD| = |un(C)| can only be checked with the key
      case Repetition::kSmoothing:
        if (enc_dict.size() > av.size()) {
          throw FormatError("smoothing dictionary larger than the column");
        }
        break;
      case Repetition::kHiding:
        if (enc_dict.size() != av.size()) {
          throw FormatError("hiding dictionary must have one entry per row");
        }
        break;
    }
  }
  if (enc_dict.size() > av.size() &&
      (kind.is_plain() || kind.repetition() == Repetition::kRevealing)) {
    throw FormatError("revealing dictionary larger than the column");
  }
}

std::set<std::string> unique_values(const PlainColumn& col) {
  return std::set<std::string>(col.values().begin(), col.values().end());
}

std::vector<RecordId> occurrences(const PlainColumn& col, std::string_view v) {
  std::vector<RecordId> out;
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col[i] == v) {
      out.push_back(static_cast<RecordId>(i));
    }
  }
  return out;
}

bool verify_split(const PlainColumn& col, const Dictionary& d,
                  const AttributeVector& av) {
  if (av.size() != col.size()) {
    return false;
  }
  for (std::size_t j = 0; j < av.size(); ++j) {
    ValueId vid = av.vids[j];
    if (vid >= d.entries.size() || d.entries[vid] != col[j]) {
      return false;
    }
  }
  return true;
}

}  // namespace edict
