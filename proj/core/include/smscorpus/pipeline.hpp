#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smscorpus/anonymize.hpp"
#include "smscorpus/config.hpp"
#include "smscorpus/ingest.hpp"
#include "smscorpus/release.hpp"
#include "smscorpus/rewards.hpp"
#include "smscorpus/store.hpp"
#include "smscorpus/validate.hpp"

namespace smscorpus {

/// Everything the operator configures once: secrets, moderation policy,
/// reference data and reward schemes. Shared by the CLI and the service so
/// both drive the store identically.
struct Toolkit {
  Secrets secrets;
  ModerationPolicy policy;
  std::vector<Reference> blocklist;
  SchemeRegistry schemes;
  EmoticonTable emoticons = EmoticonTable::builtin();
  TranscriptionBounds bounds;
};

struct Submission {
  std::string payload;
  std::optional<CollectionMethod> declared_method;
  Source source = Source::community;
  std::optional<std::string> contributor;
  std::optional<UserProfile> profile;  // id is assigned on submit
  bool attested_personal = false;
};

struct SubmissionResult {
  std::string batch_id;
  InputFormat format = InputFormat::unknown;
  std::vector<std::string> message_ids;
  std::optional<std::string> profile_id;
  QualityReport report;
  std::vector<std::string> warnings;
};

/// detect -> parse -> (verify) -> anonymize -> store as pending -> report.
/// The raw payload is never persisted. Throws ParseError for unusable
/// payloads, CorpusError(unauthorized) for a bad upload code and
/// CorpusError(invalid_argument) when the declared method contradicts the
/// detected format.
SubmissionResult submit(Store& store, const Toolkit& toolkit, const Submission& submission,
                        Timestamp received_at = Timestamp::now());

/// Recomputes a stored batch's quality report against the current corpus.
QualityReport report_for_batch(const Store& store, const Toolkit& toolkit,
                               std::string_view batch_id);

/// Builds and registers a release from the approved corpus.
ReleaseBundle publish_release(Store& store, std::string_view version_id,
                              Timestamp created_at = Timestamp::now());

/// Verifies a registered release from the artifacts kept in the store.
VerifyReport verify_stored_release(const Store& store, std::string_view version_id);

/// Profile answers as JSON object (`{"age": "21-25", ...}`); missing or
/// unrecognized answers become unknown. Throws ParseError(malformed).
UserProfile profile_from_json(std::string_view json_text);
std::string profile_to_json(const UserProfile& profile);

}  // namespace smscorpus
