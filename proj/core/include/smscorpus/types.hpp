#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smscorpus/timestamp.hpp"

namespace smscorpus {

enum class Language { english, chinese, mixed, unknown };
enum class CollectionMethod { transcription, export_archive, upload };
enum class Source { mturk, shorttask, zhubajie, local, community };
enum class Status { pending, approved, rejected };
enum class Currency { USD, CNY, SGD };

enum class AgeBucket {
  under_16,
  age_16_20,
  age_21_25,
  age_26_30,
  age_31_35,
  age_36_40,
  age_41_45,
  age_46_50,
  over_50,
  unknown
};
enum class Gender { female, male, unknown };
enum class TriState { yes, no, unknown };
enum class DailySmsBucket { d2_5, d5_10, d10_50, over_50, unknown };
enum class YearsSmsBucket { under_1, y1_3, y3_5, y5_10, over_10, unknown };

template <typename E>
struct EnumLabels;

#define SMSCORPUS_ENUM_LABELS(E, N, ...)                                    \
  template <>                                                             \
  struct EnumLabels<E> {                                                  \
    static constexpr std::array<std::pair<E, std::string_view>, N> table{ \
        {__VA_ARGS__}};                                                   \
  }

SMSCORPUS_ENUM_LABELS(Language, 4, {Language::english, "english"},
                      {Language::chinese, "chinese"}, {Language::mixed, "mixed"},
                      {Language::unknown, "unknown"});
SMSCORPUS_ENUM_LABELS(CollectionMethod, 3,
                      {CollectionMethod::transcription, "transcription"},
                      {CollectionMethod::export_archive, "export"},
                      {CollectionMethod::upload, "upload"});
SMSCORPUS_ENUM_LABELS(Source, 5, {Source::mturk, "mturk"},
                      {Source::shorttask, "shorttask"},
                      {Source::zhubajie, "zhubajie"}, {Source::local, "local"},
                      {Source::community, "community"});
SMSCORPUS_ENUM_LABELS(Status, 3, {Status::pending, "pending"},
                      {Status::approved, "approved"},
                      {Status::rejected, "rejected"});
SMSCORPUS_ENUM_LABELS(Currency, 3, {Currency::USD, "USD"}, {Currency::CNY, "CNY"},
                      {Currency::SGD, "SGD"});
SMSCORPUS_ENUM_LABELS(AgeBucket, 10, {AgeBucket::under_16, "<16"},
                      {AgeBucket::age_16_20, "16-20"},
                      {AgeBucket::age_21_25, "21-25"},
                      {AgeBucket::age_26_30, "26-30"},
                      {AgeBucket::age_31_35, "31-35"},
                      {AgeBucket::age_36_40, "36-40"},
                      {AgeBucket::age_41_45, "41-45"},
                      {AgeBucket::age_46_50, "46-50"},
                      {AgeBucket::over_50, ">50"},
                      {AgeBucket::unknown, "unknown"});
SMSCORPUS_ENUM_LABELS(Gender, 3, {Gender::female, "female"}, {Gender::male, "male"},
                      {Gender::unknown, "unknown"});
SMSCORPUS_ENUM_LABELS(TriState, 3, {TriState::yes, "yes"}, {TriState::no, "no"},
                      {TriState::unknown, "unknown"});
SMSCORPUS_ENUM_LABELS(DailySmsBucket, 5, {DailySmsBucket::d2_5, "2-5"},
                      {DailySmsBucket::d5_10, "5-10"},
                      {DailySmsBucket::d10_50, "10-50"},
                      {DailySmsBucket::over_50, ">50"},
                      {DailySmsBucket::unknown, "unknown"});
SMSCORPUS_ENUM_LABELS(YearsSmsBucket, 6, {YearsSmsBucket::under_1, "<1"},
                      {YearsSmsBucket::y1_3, "1-3"},
                      {YearsSmsBucket::y3_5, "3-5"},
                      {YearsSmsBucket::y5_10, "5-10"},
                      {YearsSmsBucket::over_10, ">10"},
                      {YearsSmsBucket::unknown, "unknown"});

#undef SMSCORPUS_ENUM_LABELS

template <typename E>
constexpr std::string_view to_string(E value) {
  for (const auto& [e, label] : EnumLabels<E>::table) {
    if (e == value) return label;
  }
  return "?";
}

/// Accepts the canonical label; bucket labels also accept an en-dash for '-'.
std::string normalize_label(std::string_view text);

template <typename E>
std::optional<E> parse_enum(std::string_view text) {
  const std::string norm = normalize_label(text);
  for (const auto& [e, label] : EnumLabels<E>::table) {
    if (label == norm) return e;
  }
  return std::nullopt;
}

template <typename E>
constexpr auto enum_values() {
  std::array<E, EnumLabels<E>::table.size()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = EnumLabels<E>::table[i].first;
  return out;
}

/// Amount in minor units (cents / fen).
struct Money {
  std::int64_t cents = 0;
  Currency currency = Currency::USD;

  bool operator==(const Money&) const = default;
};

/// "4.50"; negative amounts are not produced by this library.
std::string format_amount(std::int64_t cents);
/// "USD 4.50"
std::string to_string(const Money& money);
/// Exact decimal parse with at most two fractional digits.
std::optional<std::int64_t> parse_amount(std::string_view text);

struct Message {
  std::string id;
  std::string body;
  Language language = Language::unknown;
  std::optional<std::string> sender_token;
  std::optional<std::string> receiver_token;
  std::optional<Timestamp> sent_at;
  CollectionMethod collection_method = CollectionMethod::transcription;
  Source source = Source::community;
  std::optional<std::string> profile_id;
  std::string batch_id;
  Status status = Status::pending;

  bool operator==(const Message&) const = default;
};

inline constexpr std::string_view kUnknown = "unknown";

/// Demographic survey answers; unanswered questions hold "unknown".
struct UserProfile {
  std::string id;
  AgeBucket age = AgeBucket::unknown;
  Gender gender = Gender::unknown;
  std::string country{kUnknown};
  TriState native_speaker = TriState::unknown;
  std::string input_method{kUnknown};
  DailySmsBucket daily_sms = DailySmsBucket::unknown;
  YearsSmsBucket years_sms = YearsSmsBucket::unknown;
  std::string phone_brand{kUnknown};
  std::string phone_model{kUnknown};
  TriState smartphone = TriState::unknown;

  bool operator==(const UserProfile&) const = default;
};

/// Names of the profile fields as used by breakdowns, dumps and JSON.
inline constexpr std::array<std::string_view, 10> kProfileFields = {
    "age",   "gender", "country", "native", "input",
    "daily", "years",  "brand",   "model",  "smartphone"};

/// Value of a profile field by name; nullopt for an unknown field name.
std::optional<std::string> profile_field(const UserProfile& profile,
                                         std::string_view field);
/// Sets a field from its textual answer. Unrecognized answers become unknown.
/// Returns false for an unknown field name.
bool set_profile_field(UserProfile& profile, std::string_view field,
                       std::string_view value);

struct SubmissionBatch {
  std::string id;
  std::string contributor_ref;
  CollectionMethod collection_method = CollectionMethod::transcription;
  Source source = Source::community;
  Timestamp received_at;
  std::vector<std::string> message_ids;
  Status status = Status::pending;
  std::optional<std::string> rejection_reason;
  std::optional<Money> reward;
  // Contributor attested the messages are personal and sent by them.
  bool attested_personal = false;

  bool operator==(const SubmissionBatch&) const = default;
};

struct CorpusVersion {
  std::string version_id;
  Timestamp created_at;
  std::int64_t message_count_en = 0;
  std::int64_t message_count_zh = 0;
  std::map<std::string, std::string> artifact_checksums;

  bool operator==(const CorpusVersion&) const = default;
};

/// Immutable in-memory view of (part of) the store.
struct CorpusSnapshot {
  std::vector<Message> messages;
  std::vector<SubmissionBatch> batches;
  std::vector<UserProfile> profiles;

  const SubmissionBatch* find_batch(std::string_view id) const;
  const UserProfile* find_profile(std::string_view id) const;
};

}  // namespace smscorpus
