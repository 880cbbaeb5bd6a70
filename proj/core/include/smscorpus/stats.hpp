#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smscorpus/types.hpp"

namespace smscorpus {

// All statistics are computed over approved messages only; anything else in
// a snapshot is ignored.

struct LanguageSummary {
  std::size_t messages = 0;
  std::size_t contributors = 0;
  std::optional<double> mean_per_contributor;  // one decimal; absent with no contributors
};

struct CorpusSummary {
  std::map<Language, LanguageSummary> by_language;
  std::size_t total_messages = 0;
  std::size_t total_contributors = 0;
};

CorpusSummary corpus_summary(const CorpusSnapshot& corpus);

enum class WeightBasis { by_message, by_contributor };
std::string_view to_string(WeightBasis basis);

struct HistogramBucket {
  std::string label;
  std::size_t count = 0;
};

struct Histogram {
  std::string dimension;
  WeightBasis weight_basis = WeightBasis::by_message;
  std::vector<HistogramBucket> buckets;  // always ends with "unknown"

  std::size_t total() const;
  /// Percentage of the total, one decimal; 0 for an empty histogram.
  double share(std::string_view label) const;
  std::size_t count(std::string_view label) const;
};

struct ContributorDistribution {
  Histogram histogram;  // 1-30, 31-100, 101-300, 301-1000, >1000
  std::size_t contributors = 0;
  std::size_t below_30 = 0;  // contributors with fewer than 30 messages
  std::optional<double> below_30_percent;
};

ContributorDistribution contributor_distribution(const CorpusSnapshot& corpus,
                                                 Language language);

/// Breakdown of a profile field (see kProfileFields). Messages without a
/// profile land in "unknown". Throws CorpusError(invalid_argument) for an
/// unknown dimension.
Histogram breakdown(const CorpusSnapshot& corpus, std::string_view dimension,
                    WeightBasis basis, std::optional<Language> language = std::nullopt);

struct MethodSourceTables {
  // method -> language -> messages
  std::map<CollectionMethod, std::map<Language, std::size_t>> by_method;
  // source -> language -> (messages, contributors)
  std::map<Source, std::map<Language, std::pair<std::size_t, std::size_t>>> by_source;
  std::map<Language, std::pair<std::size_t, std::size_t>> totals;
};

MethodSourceTables method_source_tables(const CorpusSnapshot& corpus);

struct LengthStats {
  std::size_t messages = 0;
  double mean_chars = 0.0;
  double mean_tokens = 0.0;
  std::string token_definition;
};

/// English: whitespace-delimited words. Chinese/mixed: each CJK character is
/// a token, as is each maximal run of other non-space characters (so a
/// placeholder code counts once).
std::size_t count_tokens(std::string_view body, Language language);
LengthStats length_stats(const CorpusSnapshot& corpus, Language language);

/// Full statistics document (JSON, stable key order, one-decimal shares).
std::string stats_report_json(const CorpusSnapshot& corpus,
                              std::optional<std::string_view> version_id = std::nullopt);

}  // namespace smscorpus
