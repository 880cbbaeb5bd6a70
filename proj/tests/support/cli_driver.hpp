#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cli {

struct Result {
  int exit_code = -1;
  std::string out;
  std::string err;

  /// First value for `key` in `key=value` output, or "".
  std::string value(const std::string& key) const;
  std::vector<std::string> values(const std::string& key) const;
};

Result run(const std::string& binary, const std::vector<std::string>& args);

struct EndToEnd {
  std::vector<std::string> failures;
  std::size_t messages = 0;
  std::string version;

  bool ok() const { return failures.empty(); }
};

/// Drives ingest, report, moderation, stats and release for the 50-message
/// fixture through the command line only, checking every step.
EndToEnd run_end_to_end(const std::string& binary, const std::filesystem::path& workdir);

}  // namespace cli
