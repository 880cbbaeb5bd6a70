#pragma once

// Independent reference implementations used to cross-check the library.
// None of these call into smscorpus.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

/// True if any sensitive span survives: an e-mail address, a URL, a dotted
/// digit pair (IP or decimal) or a run of two or more ASCII digits.
bool has_residual(std::string_view text);

/// Phone-number shape: optional '+', 5 to 15 digits, ignoring separators.
bool looks_like_phone(std::string_view text);

/// 3-gram Jaccard computed by brute force over sorted gram vectors.
double jaccard(std::string_view a, std::string_view b);

std::u32string decode_utf8(std::string_view text);

/// Random text mixing the replacement-code exemplars with filler: words,
/// CJK characters, emoticons, punctuation and lone digits.
std::string fuzz_text(std::mt19937_64& rng);

/// Distinct synthetic numbers in assorted national formats.
std::vector<std::string> synthetic_numbers(std::size_t n, std::uint64_t seed);

}  // namespace oracle
