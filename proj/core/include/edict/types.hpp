#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace edict {

using ValueId = std::uint32_t;
using RecordId = std::uint32_t;

// All-ones marker used for the dummy range returned by dictionary search.
inline constexpr ValueId kDummyVid = 0xFFFFFFFFu;

// Columns are capped so that every row index fits a ValueId and the dummy
// marker stays unused.
inline constexpr std::uint64_t kMaxRows = 0xFFFFFFFEull;

// A plaintext column: an ordered sequence of byte strings, each no longer
// than the column's fixed maximal length. The index of a value is its
// RecordId.
class PlainColumn {
 public:
  PlainColumn() = default;

  // max_len defaults to the longest value present.
  explicit PlainColumn(std::vector<std::string> values);
  PlainColumn(std::vector<std::string> values, std::size_t max_len);

  const std::vector<std::string>& values() const { return values_; }
  const std::string& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::size_t max_len() const { return max_len_; }

 private:
  std::vector<std::string> values_;
  std::size_t max_len_ = 0;
};

// Pre-encryption dictionary; the index of an entry is its ValueId.
struct Dictionary {
  std::vector<std::string> entries;

  std::size_t size() const { return entries.size(); }
};

// Per-row ValueIds; the index of an entry is its RecordId.
struct AttributeVector {
  std::vector<ValueId> vids;

  std::size_t size() const { return vids.size(); }
};

enum class Repetition { kRevealing, kSmoothing, kHiding };
enum class Order { kSorted, kRotated, kUnsorted };

// One of the nine encrypted dictionary configurations (repetition option
// crossed with order option) or the plaintext passthrough.
class EdKind {
 public:
  static EdKind plain() { return EdKind(0); }
  static EdKind ed(int number);  // 1..9
  static EdKind of(Repetition rep, Order order);

  bool is_plain() const { return code_ == 0; }
  int number() const { return code_; }

  // Valid for numbers 1..9; plain behaves as a sorted revealing dictionary.
  Repetition repetition() const;
  Order order() const;

  bool operator==(const EdKind& other) const { return code_ == other.code_; }
  bool operator!=(const EdKind& other) const { return code_ != other.code_; }

  std::string name() const;

 private:
  explicit EdKind(int code) : code_(code) {}
  int code_;
};

// A probabilistic authenticated ciphertext: nonce, body, tag. Plain stores
// reuse the container with empty nonce/tag and the value itself as body.
struct EncryptedValue {
  std::array<std::uint8_t, 12> nonce{};
  std::vector<std::uint8_t> body;
  std::array<std::uint8_t, 16> tag{};

  bool operator==(const EncryptedValue& other) const = default;
};

// A search interval over values, with optional open endpoints and
// infinity sentinels on either side.
class SearchRange {
 public:
  enum class LoKind : std::uint8_t { kNegInf, kValue };
  enum class HiKind : std::uint8_t { kValue, kPosInf };

  static SearchRange all();
  static SearchRange equals(std::string v);
  static SearchRange closed(std::string lo, std::string hi);
  static SearchRange interval(std::string lo, bool lo_inclusive,
                              std::string hi, bool hi_inclusive);
  static SearchRange less_than(std::string hi, bool inclusive);
  static SearchRange greater_than(std::string lo, bool inclusive);

  LoKind lo_kind() const { return lo_kind_; }
  HiKind hi_kind() const { return hi_kind_; }
  const std::string& lo() const { return lo_; }
  const std::string& hi() const { return hi_; }
  bool lo_inclusive() const { return lo_inclusive_; }
  bool hi_inclusive() const { return hi_inclusive_; }

  bool contains(std::string_view v) const;

 private:
  SearchRange() = default;

  LoKind lo_kind_ = LoKind::kNegInf;
  HiKind hi_kind_ = HiKind::kPosInf;
  std::string lo_;
  std::string hi_;
  bool lo_inclusive_ = true;
  bool hi_inclusive_ = true;
};

// An encrypted, encoded column: the encrypted dictionary, the plaintext
// attribute vector, and the metadata needed to search it.
struct EncodedColumnStore {
  EdKind kind = EdKind::plain();
  std::vector<EncryptedValue> enc_dict;
  AttributeVector av;
  std::size_t max_len = 0;
  std::optional<std::uint32_t> bs_max;          // smoothing only
  std::optional<EncryptedValue> enc_rnd_offset;  // rotated only
  std::string table_name;
  std::string column_name;

  std::size_t dict_size() const { return enc_dict.size(); }
  std::size_t rows() const { return av.size(); }

  // Throws FormatError when a structural invariant is violated.
  void validate() const;
};

// The distinct values of a column.
std::set<std::string> unique_values(const PlainColumn& col);

// Ascending row indices holding v; empty when v is absent.
std::vector<RecordId> occurrences(const PlainColumn& col, std::string_view v);

// Split correctness: every row's dictionary entry equals the column value.
bool verify_split(const PlainColumn& col, const Dictionary& d,
                  const AttributeVector& av);

}  // namespace edict
