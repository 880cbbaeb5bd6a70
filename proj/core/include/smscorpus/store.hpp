#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "smscorpus/types.hpp"

namespace smscorpus {

inline constexpr std::size_t kMaxPageLimit = 1000;

struct MessageFilter {
  std::optional<Language> language;
  std::optional<Source> source;
  std::optional<CollectionMethod> method;
  std::optional<Status> status;
  std::optional<std::string> profile_id;

  /// Builds a filter from textual parameters (`language`, `source`,
  /// `method`, `status`, `profile_id`). Throws CorpusError(invalid_argument)
  /// on an unknown key or value.
  static MessageFilter parse(const std::map<std::string, std::string>& params);
};

struct Page {
  std::size_t offset = 0;
  std::size_t limit = 100;
};

struct MessagePage {
  std::vector<Message> messages;
  std::size_t total = 0;
};

struct StoredArtifact {
  std::string name;
  std::string bytes;
  std::string digest;
};

/// Embedded, file-backed corpus store.
///
/// One writer at a time: every mutation runs inside a single transaction
/// under an exclusive lock, reads take a shared lock and only ever observe
/// committed state.
class Store {
 public:
  /// Opens (creating if needed) the store rooted at `dir`.
  static Store open(const std::filesystem::path& dir);
  /// Private in-memory store, used by tests and dry runs.
  static Store in_memory();

  Store(Store&&) noexcept;
  Store& operator=(Store&&) noexcept;
  ~Store();

  const std::filesystem::path& root() const { return root_; }

  /// Reserves a fresh batch id (`B000001`, `B000002`, ...).
  std::string allocate_batch_id();

  /// Stores a batch, its messages and optional profile atomically. Message
  /// status is forced to the batch status and batch.message_ids to the
  /// message ids. Throws CorpusError(duplicate_id / referential /
  /// invariant_violation).
  std::vector<std::string> put_batch(SubmissionBatch batch, std::vector<Message> messages,
                                     const std::optional<UserProfile>& profile);

  /// Ordered by (batch received_at, message id).
  MessagePage query_messages(const MessageFilter& filter, Page page) const;

  std::optional<SubmissionBatch> get_batch(std::string_view id) const;
  std::vector<SubmissionBatch> list_batches(std::optional<Status> status = std::nullopt) const;
  std::vector<Message> batch_messages(std::string_view batch_id) const;
  std::optional<UserProfile> get_profile(std::string_view id) const;

  /// pending -> approved|rejected. Throws CorpusError(not_found) or
  /// CorpusError(conflict) when the batch is no longer pending.
  SubmissionBatch finalize_batch(std::string_view batch_id, Status decision,
                                 std::optional<std::string> reason,
                                 std::optional<Money> reward);

  /// All batches/messages/profiles, or only approved messages with their
  /// batches and referenced profiles.
  CorpusSnapshot snapshot(bool approved_only) const;

  /// Registers a release. Throws CorpusError(non_monotone_version) unless
  /// the id is greater than every existing one, and
  /// CorpusError(shrinking_corpus) if a language count decreases.
  void put_version(const CorpusVersion& version, const std::vector<StoredArtifact>& artifacts);
  std::vector<CorpusVersion> versions() const;
  std::optional<CorpusVersion> latest_version() const;
  std::optional<StoredArtifact> artifact(std::string_view version_id,
                                         std::string_view name) const;

 private:
  struct Impl;
  Store(std::unique_ptr<Impl> impl, std::filesystem::path root);

  std::unique_ptr<Impl> impl_;
  std::filesystem::path root_;
  mutable std::unique_ptr<std::shared_mutex> mutex_;
};

}  // namespace smscorpus
