#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nitireward {

/// Corpus-local integer key of one legal section. Not a statute number.
struct LawCode {
  std::uint64_t value = 0;

  constexpr LawCode() = default;
  constexpr explicit LawCode(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(const LawCode&, const LawCode&) = default;
};

using CodeSet = std::set<LawCode>;

std::string to_string(LawCode code);

// Parses the inner text of a <law_code> tag: optional surrounding ASCII
// whitespace around a run of decimal digits that fits in 64 bits.
std::optional<LawCode> parse_law_code(std::string_view text);

CodeSet to_code_set(std::span<const LawCode> codes);
CodeSet make_code_set(std::initializer_list<std::uint64_t> values);

}  // namespace nitireward
