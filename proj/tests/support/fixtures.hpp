#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "smscorpus/pipeline.hpp"
#include "smscorpus/types.hpp"

namespace fixtures {

std::string read(std::string_view relative);
std::filesystem::path path(std::string_view relative);
std::filesystem::path data_dir();

/// Fixed, test-only secrets.
smscorpus::Secrets secrets();
std::string secrets_text();

/// Toolkit with the shipped policy, blocklist, schemes and emoticons.
smscorpus::Toolkit toolkit();

/// Removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Distinct letters-only English text for index i.
std::string english_body(std::size_t i);
/// Distinct CJK text for index i.
std::string chinese_body(std::size_t i);

/// Builds snapshots of approved batches directly, bypassing ingestion.
class CorpusBuilder {
 public:
  struct Spec {
    smscorpus::Language language = smscorpus::Language::english;
    smscorpus::CollectionMethod method = smscorpus::CollectionMethod::export_archive;
    smscorpus::Source source = smscorpus::Source::local;
    smscorpus::Status status = smscorpus::Status::approved;
    std::optional<smscorpus::UserProfile> profile;
    std::string contributor;  // defaults to a fresh one per batch
  };

  /// Adds one batch of `count` messages; returns the batch id.
  std::string add_batch(std::size_t count, Spec spec);
  /// Splits `total` as evenly as possible over `contributors` batches.
  void add_group(std::size_t total, std::size_t contributors, const Spec& spec);

  const smscorpus::CorpusSnapshot& snapshot() const { return snapshot_; }

 private:
  smscorpus::CorpusSnapshot snapshot_;
  std::size_t next_batch_ = 1;
  std::size_t next_body_ = 0;
};

/// English: 28,724 messages over 116 contributors (63 with fewer than 30),
/// by method 480 / 11,104 / 17,140, gender 16.1 / 71.1 / 12.8 percent by
/// message, 56.9 percent of messages from the 21-25 bucket.
/// Chinese: 29,100 messages over 515 contributors.
smscorpus::CorpusSnapshot reference_totals_corpus();

/// Approved corpus of `n` messages with random bodies, metadata and profiles.
smscorpus::CorpusSnapshot random_corpus(std::mt19937_64& rng, std::size_t n);

}  // namespace fixtures
