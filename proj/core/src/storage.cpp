#include "edict/storage.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <numeric>

#include "edict/errors.hpp"

namespace edict {

namespace fs = std::filesystem;

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>(v >> (8 * i)));
  }
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(v >> (8 * i)));
  }
}

// Bounds-checked little-endian reader that names the offending field.
class Reader {
 public:
  Reader(const std::string& data, std::string file)
      : data_(data), file_(std::move(file)) {}

  std::uint8_t u8(const char* field) { return take(1, field)[0]; }

  std::uint16_t u16(const char* field) {
    const auto* p = take(2, field);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }

  std::uint32_t u32(const char* field) {
    const auto* p = take(4, field);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | p[i];
    }
    return v;
  }

  std::uint64_t u64(const char* field) {
    const auto* p = take(8, field);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
      v = (v << 8) | p[i];
    }
    return v;
  }

  std::string bytes(std::size_t n, const char* field) {
    const auto* p = take(n, field);
    return std::string(reinterpret_cast<const char*>(p), n);
  }

  void expect_end() {
    if (pos_ != data_.size()) {
      throw FormatError(file_ + ": trailing bytes after the last field");
    }
  }

 private:
  const std::uint8_t* take(std::size_t n, const char* field) {
    if (data_.size() - pos_ < n) {
      throw FormatError(file_ + ": truncated while reading " +
                        std::string(field));
    }
    const auto* p = reinterpret_cast<const std::uint8_t*>(data_.data()) + pos_;
    pos_ += n;
    return p;
  }

  const std::string& data_;
  std::string file_;
  std::size_t pos_ = 0;
};

// Write-then-rename with fsync on the file and its directory.
void atomic_write(const fs::path& path, const std::string& data) {
  const fs::path tmp = path.parent_path() / (".tmp." + path.filename().string());
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw IoError("cannot create " + tmp.string() + ": " +
                  std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < data.size()) {
    ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      ::close(fd);
      throw IoError("write failed for " + tmp.string() + ": " +
                    std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw IoError("fsync failed for " + tmp.string());
  }
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw IoError("rename to " + path.string() + " failed: " + ec.message());
  }
  int dfd = ::open(path.parent_path().c_str(), O_RDONLY | O_DIRECTORY);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failed for " + path.string());
  }
  return data;
}

std::string serialize_ciphertext(const EncryptedValue& c) {
  std::string out;
  out.reserve(c.nonce.size() + c.body.size() + c.tag.size());
  out.append(reinterpret_cast<const char*>(c.nonce.data()), c.nonce.size());
  out.append(reinterpret_cast<const char*>(c.body.data()), c.body.size());
  out.append(reinterpret_cast<const char*>(c.tag.data()), c.tag.size());
  return out;
}

EncryptedValue parse_ciphertext(const std::string& bytes, const char* field) {
  if (bytes.size() < 28) {
    throw FormatError(std::string(field) + ": ciphertext shorter than nonce "
                      "and tag");
  }
  EncryptedValue c;
  std::memcpy(c.nonce.data(), bytes.data(), 12);
  c.body.assign(bytes.begin() + 12, bytes.end() - 16);
  std::memcpy(c.tag.data(), bytes.data() + bytes.size() - 16, 16);
  return c;
}

}  // namespace

void save(const EncodedColumnStore& store, const fs::path& dir, Rng& rng) {
  store.validate();
  if (store.max_len > 0xFFFF) {
    throw FormatError("max_len exceeds the on-disk field width");
  }
  if (store.table_name.size() > 0xFFFF || store.column_name.size() > 0xFFFF) {
    throw FormatError("table or column name exceeds the on-disk field width");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir.string() + ": " +
                  ec.message());
  }

  std::string meta;
  meta.append("EDBD");
  put_u16(meta, kStoreFormatVersion);
  meta.push_back(static_cast<char>(store.kind.number()));
  put_u16(meta, static_cast<std::uint16_t>(store.max_len));
  put_u32(meta, store.bs_max.value_or(0));
  put_u64(meta, store.rows());
  put_u64(meta, store.dict_size());
  if (store.enc_rnd_offset.has_value()) {
    const std::string bytes = serialize_ciphertext(*store.enc_rnd_offset);
    put_u32(meta, static_cast<std::uint32_t>(bytes.size()));
    meta.append(bytes);
  } else {
    put_u32(meta, 0);
  }
  put_u16(meta, static_cast<std::uint16_t>(store.table_name.size()));
  meta.append(store.table_name);
  put_u16(meta, static_cast<std::uint16_t>(store.column_name.size()));
  meta.append(store.column_name);

  // Tail records land in a fresh random order; the head keeps ValueId
  // order and points into the tail.
  const std::size_t n = store.dict_size();
  std::vector<std::uint32_t> placement(n);
  std::iota(placement.begin(), placement.end(), 0);
  rng.shuffle(placement);

  std::string tail;
  std::vector<std::uint64_t> offsets(n, 0);
  std::vector<std::uint64_t> lengths(n, 0);
  for (std::uint32_t vid : placement) {
    const std::string record = serialize_ciphertext(store.enc_dict[vid]);
    offsets[vid] = tail.size();
    lengths[vid] = record.size();
    tail.append(record);
  }

  std::string head;
  head.reserve(16 * n);
  for (std::size_t vid = 0; vid < n; ++vid) {
    put_u64(head, offsets[vid]);
    put_u64(head, lengths[vid]);
  }

  std::string av;
  av.reserve(4 * store.rows());
  for (ValueId vid : store.av.vids) {
    put_u32(av, vid);
  }

  atomic_write(dir / "meta", meta);
  atomic_write(dir / "dict_head", head);
  atomic_write(dir / "dict_tail", tail);
  atomic_write(dir / "av", av);
}

EncodedColumnStore load(const fs::path& dir) {
  const std::string meta = read_file(dir / "meta");
  Reader r(meta, "meta");
  if (r.bytes(4, "magic") != "EDBD") {
    throw FormatError("meta: bad magic");
  }
  const std::uint16_t version = r.u16("version");
  if (version != kStoreFormatVersion) {
    throw VersionError("meta: unsupported format version " +
                       std::to_string(version));
  }
  const std::uint8_t kind_code = r.u8("kind");
  if (kind_code > 9) {
    throw FormatError("meta: kind out of range");
  }
  EncodedColumnStore store;
  store.kind = kind_code == 0 ? EdKind::plain() : EdKind::ed(kind_code);
  store.max_len = r.u16("max_len");
  const std::uint32_t bs_max = r.u32("bs_max");
  const std::uint64_t rows = r.u64("row_count");
  const std::uint64_t dict_count = r.u64("dict_count");
  if (rows > kMaxRows) {
    throw FormatError("meta: row_count exceeds the supported maximum");
  }
  const std::uint32_t offset_len = r.u32("offset length");
  if (offset_len > 0) {
    store.enc_rnd_offset =
        parse_ciphertext(r.bytes(offset_len, "offset ciphertext"),
                         "meta offset ciphertext");
  }
  store.table_name = r.bytes(r.u16("table name length"), "table name");
  store.column_name = r.bytes(r.u16("column name length"), "column name");
  r.expect_end();

  const bool smoothing = !store.kind.is_plain() &&
                         store.kind.repetition() == Repetition::kSmoothing;
  if (smoothing) {
    if (bs_max == 0) {
      throw FormatError("meta: smoothing store without bs_max");
    }
    store.bs_max = bs_max;
  } else if (bs_max != 0) {
    throw FormatError("meta: bs_max set for a non-smoothing store");
  }

  const std::string head = read_file(dir / "dict_head");
  if (head.size() != 16 * dict_count) {
    throw FormatError("dict_head: size does not match the dictionary count");
  }
  const std::string tail = read_file(dir / "dict_tail");

  Reader hr(head, "dict_head");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
  extents.reserve(dict_count);
  store.enc_dict.reserve(dict_count);
  for (std::uint64_t i = 0; i < dict_count; ++i) {
    const std::uint64_t offset = hr.u64("offset");
    const std::uint64_t length = hr.u64("length");
    if (length < 28 || offset > tail.size() || length > tail.size() - offset) {
      throw FormatError("dict_head: entry " + std::to_string(i) +
                        " points outside the tail");
    }
    if (length - 28 > store.max_len) {
      throw FormatError("dict_head: entry " + std::to_string(i) +
                        " longer than the column maximum");
    }
    extents.emplace_back(offset, length);
    store.enc_dict.push_back(parse_ciphertext(
        tail.substr(offset, length), "dict_tail record"));
  }
  // The tail must be a dense packing: no gaps, no overlaps.
  std::sort(extents.begin(), extents.end());
  std::uint64_t expected = 0;
  for (const auto& [offset, length] : extents) {
    if (offset != expected) {
      throw FormatError("dict_tail: records are not densely packed");
    }
    expected = offset + length;
  }
  if (expected != tail.size()) {
    throw FormatError("dict_tail: trailing bytes after the last record");
  }

  const std::string av = read_file(dir / "av");
  if (av.size() != 4 * rows) {
    throw FormatError("av: size does not match the row count");
  }
  Reader ar(av, "av");
  store.av.vids.reserve(rows);
  for (std::uint64_t i = 0; i < rows; ++i) {
    const std::uint32_t vid = ar.u32("vid");
    if (vid >= dict_count) {
      throw FormatError("av: entry " + std::to_string(i) +
                        " exceeds the dictionary size");
    }
    store.av.vids.push_back(vid);
  }

  store.validate();
  return store;
}

void save_validity(const std::vector<std::uint8_t>& valid,
                   const fs::path& dir) {
  std::string bytes(valid.begin(), valid.end());
  atomic_write(dir / "validity", bytes);
}

std::vector<std::uint8_t> load_validity(const fs::path& dir,
                                        std::size_t rows) {
  const fs::path path = dir / "validity";
  if (!fs::exists(path)) {
    return std::vector<std::uint8_t>(rows, 1);
  }
  const std::string data = read_file(path);
  if (data.size() != rows) {
    throw FormatError("validity: size does not match the row count");
  }
  std::vector<std::uint8_t> out;
  out.reserve(rows);
  for (char c : data) {
    if (c != 0 && c != 1) {
      throw FormatError("validity: flag byte must be 0 or 1");
    }
    out.push_back(static_cast<std::uint8_t>(c));
  }
  return out;
}

void save_dynamic(const DynamicColumn& dc, const fs::path& dir, Rng& rng) {
  save(dc.main, dir, rng);
  save_validity(dc.valid_main, dir);
  save(dc.delta, dir / "delta", rng);
  save_validity(dc.valid_delta, dir / "delta");
}

DynamicColumn load_dynamic(const fs::path& dir) {
  EncodedColumnStore main = load(dir);
  const std::size_t main_rows = main.rows();
  DynamicColumn dc = make_dynamic(std::move(main));
  dc.valid_main = load_validity(dir, main_rows);
  if (has_delta(dir)) {
    dc.delta = load(dir / "delta");
    dc.valid_delta = load_validity(dir / "delta", dc.delta.rows());
    if (dc.delta.kind != EdKind::ed(9)) {
      throw FormatError("delta store must hide order and frequency");
    }
  }
  return dc;
}

bool has_delta(const fs::path& dir) {
  return fs::exists(dir / "delta" / "meta");
}

std::uintmax_t store_bytes(const fs::path& dir) {
  std::uintmax_t total = 0;
  for (const char* name : {"meta", "dict_head", "dict_tail", "av",
                           "validity"}) {
    const fs::path p = dir / name;
    if (fs::exists(p)) {
      total += fs::file_size(p);
    }
  }
  if (has_delta(dir)) {
    total += store_bytes(dir / "delta");
  }
  return total;
}

std::vector<std::string> read_value_lines(const fs::path& path) {
  const std::string data = read_file(path);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    const bool has_newline = end != std::string::npos;
    std::size_t len = (has_newline ? end : data.size()) - start;
    if (len > 0 && data[start + len - 1] == '\r') {
      --len;
    }
    out.emplace_back(data, start, len);
    start = has_newline ? end + 1 : data.size();
  }
  return out;
}

}  // namespace edict
