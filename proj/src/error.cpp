#include "nitireward/error.hpp"

namespace nitireward {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return "invalid_argument";
    case ErrorKind::Input:
      return "input";
    case ErrorKind::Config:
      return "config";
    case ErrorKind::Upstream:
      return "upstream";
    case ErrorKind::UpstreamReply:
      return "upstream_reply";
  }
  return "unknown";
}

}  // namespace nitireward
