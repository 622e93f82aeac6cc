#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck::text {

std::string_view trim(std::string_view s);

// Collapses runs of whitespace (ASCII and U+00A0) to one space and trims.
std::string collapse_whitespace(std::string_view s);

std::string ascii_lower(std::string_view s);

// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view s);

std::string sha256_hex(std::string_view data);

// Rough token estimate used when a backend does not report usage: one token
// per four UTF-8 bytes, rounded up.
std::int64_t estimate_tokens(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace factcheck::text
