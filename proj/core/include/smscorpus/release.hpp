#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smscorpus/types.hpp"

namespace smscorpus {

enum class ArtifactKind { xml_dump, sql_dump, stats_report };
std::string_view to_string(ArtifactKind kind);

struct ReleaseArtifact {
  ArtifactKind kind;
  std::string name;    // corpus-<v>.xml, corpus-<v>.sql, stats-<v>.json
  std::string bytes;
  std::string digest;  // sha256, lowercase hex
};

/// What a release publishes: approved messages (without batch linkage or
/// status) and the profiles they reference, both sorted by id.
struct ReleaseContent {
  std::string version_id;
  std::string date;
  std::vector<Message> messages;
  std::vector<UserProfile> profiles;
  std::vector<std::string> warnings;  // filled by the parser only

  std::size_t count(Language language) const;
};

struct ReleaseBundle {
  CorpusVersion version;
  std::vector<ReleaseArtifact> artifacts;
  std::string manifest;  // `<sha256>  <file name>` lines

  const ReleaseArtifact* find(ArtifactKind kind) const;
};

/// `YYYY-MM` with a month in 1..12.
bool valid_version_id(std::string_view version_id);

std::string xml_dump_name(std::string_view version_id);
std::string sql_dump_name(std::string_view version_id);
std::string stats_report_name(std::string_view version_id);
std::string manifest_name(std::string_view version_id);

/// Reduces a snapshot to the released view (approved only, sorted).
ReleaseContent release_content(const CorpusSnapshot& snapshot, std::string_view version_id);

std::string render_release_xml(const ReleaseContent& content);
std::string render_release_sql(const ReleaseContent& content);

/// Deterministic in (snapshot, version_id); `created_at` only lands in the
/// returned CorpusVersion. Throws CorpusError(invalid_argument) for a bad id
/// or unapproved messages, CorpusError(non_monotone_version) /
/// CorpusError(shrinking_corpus) against `previous`.
ReleaseBundle build_release(const CorpusSnapshot& snapshot, std::string_view version_id,
                            const std::optional<CorpusVersion>& previous,
                            Timestamp created_at);

/// Throws ParseError(schema_violation) with line/column. Unknown attributes
/// are accepted and reported in `warnings`.
ReleaseContent parse_release_xml(std::string_view bytes);

/// Row counts per table after loading a SQL dump into an empty database.
std::map<std::string, std::size_t> sql_dump_row_counts(std::string_view sql);

/// `<digest>  <name>` lines -> name -> digest.
std::map<std::string, std::string> parse_manifest(std::string_view manifest);

struct Changelog {
  std::vector<std::string> added_message_ids;
  std::vector<std::string> added_profile_ids;
  std::map<Language, long long> count_deltas;

  bool empty() const;
};

/// Throws CorpusError(incomparable_versions) when v1 is newer than v2 or
/// v2 does not contain every message of v1.
Changelog diff_releases(const ReleaseContent& v1, const ReleaseContent& v2);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
  std::size_t xml_messages = 0;
  std::size_t xml_profiles = 0;
  std::size_t sql_messages = 0;
  std::size_t sql_profiles = 0;
};

/// Digests against the manifest, XML parse + re-render byte identity, SQL
/// row counts against the XML, and residual-PII freedom of every body.
VerifyReport verify_release(std::string_view version_id,
                            const std::map<std::string, std::string>& files_by_name,
                            std::string_view manifest);

}  // namespace smscorpus
