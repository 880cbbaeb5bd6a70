#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace smscorpus::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

bool is_valid(std::string_view bytes);

/// Decodes, substituting U+FFFD for each invalid sequence.
std::vector<char32_t> decode(std::string_view bytes);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

/// Strips a leading UTF-8 byte-order mark.
std::string_view strip_bom(std::string_view bytes);

/// Replaces invalid sequences with U+FFFD, drops C0 controls other than
/// tab/newline, DEL, and folds CRLF/CR to LF.
std::string sanitize(std::string_view bytes);

bool is_cjk(char32_t cp);
bool is_latin_letter(char32_t cp);
bool is_space(char32_t cp);

std::size_t codepoint_count(std::string_view bytes);

}  // namespace smscorpus::utf8
