#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace phishkit::utf8 {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes UTF-8 into Unicode scalar values. Invalid sequences (truncated,
// overlong, surrogate, out of range) decode to U+FFFD, one replacement per
// rejected byte, so decoding is total. Sets *had_errors when given.
std::vector<char32_t> decode(std::string_view s, bool* had_errors = nullptr);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

// Number of Unicode scalar values in s (invalid bytes count as one each).
std::size_t length(std::string_view s);

// Re-encodes s, replacing invalid sequences with U+FFFD.
std::string sanitize(std::string_view s, bool* had_errors = nullptr);

// ASCII-only lowercasing; bytes outside A-Z pass through untouched.
std::string lowercase_ascii(std::string_view s);

} // namespace phishkit::utf8
