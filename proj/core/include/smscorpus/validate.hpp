#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smscorpus/rewards.hpp"
#include "smscorpus/types.hpp"

namespace smscorpus {

class Store;

/// r = CJK / (CJK + Latin letters): chinese if r >= 0.7, english if
/// r <= 0.1, mixed otherwise, unknown without letters. Placeholder codes
/// are not counted.
Language detect_language(std::string_view text);

/// ASCII case folding, whitespace runs collapsed to one space, trimmed.
std::string normalize_for_match(std::string_view text);

/// Character (code point) 3-grams of the normalized text. Texts shorter than
/// three code points contribute themselves as a single shingle.
std::set<std::u32string> shingles(std::string_view text);

double jaccard(const std::set<std::u32string>& a, const std::set<std::u32string>& b);

/// Exact set-based 3-gram Jaccard similarity of two texts.
double similarity(std::string_view a, std::string_view b);

enum class ReferenceKind { corpus, blocklist };

struct Reference {
  std::string id;
  std::string text;
  ReferenceKind kind;
};

struct DuplicateMatch {
  std::string reference_id;
  ReferenceKind kind;
  double score = 1.0;
};

/// Reference texts (corpus messages and known public SMS) indexed for exact
/// and near-duplicate lookup. Near-duplicate scores are exact; the inverted
/// shingle index only prunes candidates that share no shingle.
class DuplicateIndex {
 public:
  void add(Reference reference);
  std::size_t size() const { return entries_.size(); }

  std::vector<DuplicateMatch> exact(std::string_view text) const;
  /// Entries with similarity >= theta, best first (ties by id).
  std::vector<DuplicateMatch> near(std::string_view text, double theta) const;

 private:
  struct Entry {
    Reference ref;
    std::string normalized;
    std::set<std::u32string> grams;
  };
  std::vector<Entry> entries_;
  std::unordered_multimap<std::string, std::size_t> by_normalized_;
  std::map<std::u32string, std::vector<std::size_t>> by_gram_;
};

/// Known publicly circulating SMS, one per line, scrubbed on load so they
/// compare against anonymized bodies.
std::vector<Reference> parse_blocklist(std::string_view text);
std::vector<Reference> load_blocklist(const std::filesystem::path& path);

struct ExactDuplicates {
  // (message id, reference id)
  std::vector<std::pair<std::string, std::string>> corpus_hits;
  std::vector<std::pair<std::string, std::string>> blocklist_hits;
};

/// Matches on normalized bodies. Messages repeated within the batch count as
/// corpus hits against their first occurrence.
ExactDuplicates find_exact_duplicates(const std::vector<Message>& batch_messages,
                                      const DuplicateIndex& references);

/// Throws CorpusError(invalid_argument) unless 0 < theta <= 1.
std::vector<DuplicateMatch> find_near_duplicates(std::string_view text,
                                                 const DuplicateIndex& references,
                                                 double theta);

struct ModerationPolicy {
  double blocklist_reject_frac = 0.3;
  double neardup_review_frac = 0.2;
  double neardup_theta = 0.8;
  bool require_profile = true;

  static ModerationPolicy parse(std::string_view text);
  static ModerationPolicy load(const std::filesystem::path& path);
};

enum class Recommendation { approve, reject, review };
std::string_view to_string(Recommendation r);

struct QualityReport {
  std::string batch_id;
  std::map<Language, std::size_t> language_counts;
  std::size_t message_count = 0;
  std::size_t exact_dup_count = 0;
  std::size_t near_dup_count = 0;
  std::size_t blocklist_hit_count = 0;
  Recommendation recommendation = Recommendation::approve;
  std::vector<std::string> reasons;
};

/// Advisory only; a batch changes state solely through moderate().
QualityReport quality_report(std::string_view batch_id,
                             const std::vector<Message>& batch_messages,
                             const DuplicateIndex& references,
                             const ModerationPolicy& policy);

/// Builds the reference index for `batch_id`: every non-rejected message of
/// other batches plus the blocklist.
DuplicateIndex reference_index(const CorpusSnapshot& corpus, std::string_view batch_id,
                               const std::vector<Reference>& blocklist);

enum class Decision { approve, reject };

struct ModerationOutcome {
  SubmissionBatch batch;
  std::optional<RewardResult> reward;
};

/// Applies a terminal decision. On approval the reward is computed from the
/// batch's message count (zero USD when no scheme applies).
ModerationOutcome moderate(Store& store, std::string_view batch_id, Decision decision,
                           std::optional<std::string> reason,
                           const RewardScheme* scheme, const ModerationPolicy& policy);

struct ApprovalCell {
  std::size_t approved = 0;
  std::size_t rejected = 0;
  double rate() const;
};

struct ApprovalTable {
  // Only cells with at least one decided batch are present.
  std::map<std::pair<CollectionMethod, Source>, ApprovalCell> cells;

  std::optional<double> rate(CollectionMethod method, Source source) const;
  std::optional<double> overall() const;
};

ApprovalTable approval_rates(const std::vector<SubmissionBatch>& batches);

}  // namespace smscorpus
