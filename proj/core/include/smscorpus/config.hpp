#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "smscorpus/anonymize.hpp"
#include "smscorpus/crypto.hpp"

namespace smscorpus {

/// Parses `key=value` lines. Blank lines and lines starting with '#' are
/// skipped; whitespace around keys and values is trimmed. Throws
/// CorpusError(malformed) naming the offending line.
std::map<std::string, std::string> parse_key_values(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Operator secrets. Never written into the store or any release artifact.
struct Secrets {
  PseudonymKey pseudonym_key;
  crypto::Bytes upload_secret;
  std::string admin_token;

  /// Key file format: `pseudonym_key=<hex>`, `upload_secret=<hex>`,
  /// `admin_token=<text>`.
  static Secrets parse(std::string_view text);
  static Secrets load(const std::filesystem::path& path);
};

}  // namespace smscorpus
