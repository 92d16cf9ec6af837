#pragma once

#include <stdexcept>
#include <string>

namespace paraeval {

/// Failure classes. They map one-to-one onto the C API status codes and the
/// CLI exit codes (usage = 1, data = 2, external = 3).
enum class ErrorKind { Usage, Data, External, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::Usage, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::Data, what}; }
inline Error external_error(const std::string& what) { return {ErrorKind::External, what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::Io, what}; }

}  // namespace paraeval
