#pragma once

#include <stdexcept>
#include <string>

namespace edict {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Ciphertext failed authentication: wrong key, or the bytes were tampered
// with. Callers are expected to abort the surrounding query.
class AuthError : public Error {
 public:
  explicit AuthError(const std::string& what) : Error(what) {}
};

// A value byte falls outside the supported alphabet (printable ASCII).
class AlphabetError : public Error {
 public:
  explicit AlphabetError(const std::string& what) : Error(what) {}
};

// A value is longer than the column's fixed maximal length.
class LengthError : public Error {
 public:
  explicit LengthError(const std::string& what) : Error(what) {}
};

// An encrypted range token decrypted fine but its payload is malformed.
class TokenError : public Error {
 public:
  explicit TokenError(const std::string& what) : Error(what) {}
};

// A filter expression could not be parsed.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// An on-disk structure is inconsistent; the message names the field.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

// The store was written by an incompatible format version.
class VersionError : public Error {
 public:
  explicit VersionError(const std::string& what) : Error(what) {}
};

// Filesystem failure; the message carries the path.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// A record or dictionary index is out of bounds.
class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what) : Error(what) {}
};

// The operating system failed to supply randomness.
class EntropyError : public Error {
 public:
  explicit EntropyError(const std::string& what) : Error(what) {}
};

}  // namespace edict
