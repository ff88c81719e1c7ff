#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace privaudit::detail {

void append_utf8(std::string& out, std::uint32_t code_point);

/// UTF-16 code units to UTF-8. Unpaired surrogates become U+FFFD and set
/// the invalid flag.
std::string utf16_to_utf8(std::span<const std::uint16_t> units, bool& invalid);

/// Validates UTF-8, replacing malformed sequences with U+FFFD.
std::string sanitize_utf8(std::string_view text, bool& invalid);

/// Decodes a NUL-terminated MUTF-8 string (DEX string_data payload).
/// Malformed sequences and unpaired surrogates become U+FFFD.
std::string mutf8_to_utf8(std::span<const std::byte> data, std::size_t& consumed, bool& invalid);

} // namespace privaudit::detail
