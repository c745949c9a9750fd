#pragma once

#include <stdexcept>
#include <string>

namespace taccompress {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed bytes: bad magic, truncated containers, corrupted payloads.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Arguments or data that violate a documented precondition.
class DataError : public Error {
 public:
  using Error::Error;
};

// An external codec failed, was missing, or broke the lossless contract.
class CodecError : public Error {
 public:
  using Error::Error;
};

}  // namespace taccompress
