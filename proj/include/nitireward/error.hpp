#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nitireward {

enum class ErrorKind {
  InvalidArgument,  // precondition violated by the caller
  Input,            // malformed input text, file or request body
  Config,           // bad configuration or mode/component mismatch
  Upstream,         // embedder / judge / tokenizer transport failure (retryable)
  UpstreamReply,    // upstream answered but the reply could not be interpreted
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool retryable() const noexcept { return kind_ == ErrorKind::Upstream; }

 private:
  ErrorKind kind_;
};

// Malformed text with the byte span that triggered the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset, std::size_t length)
      : Error(ErrorKind::Input, message + " (at byte " + std::to_string(offset) + ", length " +
                                    std::to_string(length) + ")"),
        offset_(offset),
        length_(length) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t length() const noexcept { return length_; }

 private:
  std::size_t offset_;
  std::size_t length_;
};

// Judge replied, but no constrained label could be read from the reply.
class JudgeReplyError : public Error {
 public:
  JudgeReplyError(const std::string& message, std::string raw_reply)
      : Error(ErrorKind::UpstreamReply, message), raw_reply_(std::move(raw_reply)) {}

  const std::string& raw_reply() const noexcept { return raw_reply_; }

 private:
  std::string raw_reply_;
};

inline Error invalid_argument(const std::string& message) {
  return Error(ErrorKind::InvalidArgument, message);
}
inline Error input_error(const std::string& message) { return Error(ErrorKind::Input, message); }
inline Error config_error(const std::string& message) { return Error(ErrorKind::Config, message); }
inline Error upstream_error(const std::string& message) {
  return Error(ErrorKind::Upstream, message);
}

}  // namespace nitireward
