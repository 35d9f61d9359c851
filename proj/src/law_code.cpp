#include "nitireward/law_code.hpp"

#include <charconv>

namespace nitireward {

std::string to_string(LawCode code) { return std::to_string(code.value); }

std::optional<LawCode> parse_law_code(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return LawCode{value};
}

CodeSet to_code_set(std::span<const LawCode> codes) { return CodeSet(codes.begin(), codes.end()); }

CodeSet make_code_set(std::initializer_list<std::uint64_t> values) {
  CodeSet out;
  for (auto v : values) out.insert(LawCode{v});
  return out;
}

}  // namespace nitireward
