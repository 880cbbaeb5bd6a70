#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smscorpus/types.hpp"

namespace smscorpus {

struct RawMessage;

// Placeholder codes substituted for sensitive spans.
inline constexpr std::string_view kEmailCode = "<EMAIL>";
inline constexpr std::string_view kUrlCode = "<URL>";
inline constexpr std::string_view kIpCode = "<IP>";
inline constexpr std::string_view kDateCode = "<DATE>";
inline constexpr std::string_view kTimeCode = "<TIME>";
inline constexpr std::string_view kDecimalCode = "<DECIMAL>";
inline constexpr std::string_view kNumberCode = "<#>";

/// Listed in application order: a rule only sees text left over by the
/// rules before it.
enum class ScrubRuleName {
  email,
  url,
  ip,
  date,
  time,
  decimal,
  hyphen_number,
  alphanumeric,
  integer
};

struct ScrubRule {
  ScrubRuleName name;
  std::string_view label;
  /// ECMAScript regex describing what the rule matches. `(?<!\d)` marks a
  /// "not preceded by a digit" boundary, which std::regex cannot express
  /// directly; the matcher implements it natively.
  std::string_view pattern;
  std::string_view replacement;
};

/// The nine rules, in precedence order.
const std::array<ScrubRule, 9>& scrub_rules();

/// Length of the longest match of `rule` starting exactly at `pos`
/// (0 if none), honoring the rule's digit boundaries. For the alphanumeric
/// rule the match is the digit run only.
std::size_t match_rule_at(ScrubRuleName rule, std::string_view text,
                          std::size_t pos);

/// Maps U+FF10..U+FF19 to ASCII digits; everything else is untouched.
std::string normalize_fullwidth_digits(std::string_view text);

struct ScrubResult {
  std::string text;
  std::array<std::size_t, 9> replacements{};  // indexed by ScrubRuleName

  std::size_t total_replacements() const;
};

ScrubResult scrub_body_detailed(std::string_view text);

/// Replaces every sensitive span with its placeholder code.
std::string scrub_body(std::string_view text);

struct ResidualMatch {
  ScrubRuleName rule;
  std::size_t begin;
  std::size_t length;
};

/// First span of `text` that some rule would still replace, if any.
std::optional<ResidualMatch> find_residual(std::string_view text);

inline bool has_residual_pii(std::string_view text) {
  return find_residual(text).has_value();
}

/// Maps emoticon variants to a canonical form (":-)" -> ":)").
class EmoticonTable {
 public:
  EmoticonTable() = default;
  explicit EmoticonTable(std::vector<std::pair<std::string, std::string>> entries);

  static const EmoticonTable& builtin();
  /// One mapping per line: `<variant> <canonical>`; '#' starts a comment line.
  static EmoticonTable parse(std::string_view text);
  static EmoticonTable load(const std::filesystem::path& path);

  /// Longest variant wins at each position; canonical forms are fixed points.
  std::string normalize(std::string_view text) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // longest first
};

inline std::string normalize_emoticons(std::string_view text) {
  return EmoticonTable::builtin().normalize(text);
}

inline constexpr std::size_t kPseudonymKeyBytes = 32;

struct PseudonymKey {
  std::vector<std::uint8_t> key_bytes;  // exactly kPseudonymKeyBytes
  std::string key_id;

  /// Throws CorpusError(invalid_argument) unless the hex decodes to 32 bytes.
  static PseudonymKey from_hex(std::string_view hex);
};

/// Strips spaces, dashes, dots and parentheses; a leading '+' is kept.
std::string normalize_phone(std::string_view phone_text);

/// Deterministic keyed one-way token `P<16 hex>`. Throws
/// CorpusError(invalid_argument) when nothing remains after normalization.
std::string pseudonymize_number(std::string_view phone_text, const PseudonymKey& key);

/// `^\+?[0-9]{5,15}$` after normalize_phone.
bool looks_like_phone_number(std::string_view text);

/// body = scrub(normalize_emoticons(sanitize(body_raw))); endpoints are
/// pseudonymized; language, ids and provenance are filled in by the caller.
Message anonymize_message(const RawMessage& raw, const PseudonymKey& key,
                          const EmoticonTable& emoticons = EmoticonTable::builtin());

}  // namespace smscorpus
