#pragma once

#include <string_view>
#include <vector>

namespace nitireward {

// Lenient UTF-8 decoding: a byte that does not start a valid sequence is
// returned as a code point equal to the byte value.
std::vector<char32_t> decode_utf8(std::string_view text);

std::size_t count_code_points(std::string_view text);

}  // namespace nitireward
