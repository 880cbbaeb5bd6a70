#include "smscorpus/types.hpp"

#include <algorithm>
#include <cctype>

#include "smscorpus/error.hpp"

namespace smscorpus {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::undecodable: return "undecodable";
    case ErrorCode::no_schema: return "no_schema";
    case ErrorCode::malformed: return "malformed";
    case ErrorCode::missing_code: return "missing_code";
    case ErrorCode::count_out_of_bounds: return "count_out_of_bounds";
    case ErrorCode::empty_slot: return "empty_slot";
    case ErrorCode::zero_messages: return "zero_messages";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::referential: return "referential";
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::missing_profile: return "missing_profile";
    case ErrorCode::unauthorized: return "unauthorized";
    case ErrorCode::payload_too_large: return "payload_too_large";
    case ErrorCode::non_monotone_version: return "non_monotone_version";
    case ErrorCode::shrinking_corpus: return "shrinking_corpus";
    case ErrorCode::schema_violation: return "schema_violation";
    case ErrorCode::incomparable_versions: return "incomparable_versions";
    case ErrorCode::digest_mismatch: return "digest_mismatch";
    case ErrorCode::io: return "io";
    case ErrorCode::storage: return "storage";
  }
  return "unknown";
}

std::string normalize_label(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  for (std::size_t i = b; i < e; ++i) {
    // U+2013 EN DASH
    if (text.compare(i, 3, "\xE2\x80\x93") == 0) {
      out.push_back('-');
      i += 2;
      continue;
    }
    out.push_back(text[i]);
  }
  return out;
}

std::string format_amount(std::int64_t cents) {
  const bool negative = cents < 0;
  const std::int64_t abs = negative ? -cents : cents;
  std::string frac = std::to_string(abs % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (negative ? "-" : "") + std::to_string(abs / 100) + "." + frac;
}

std::string to_string(const Money& money) {
  return std::string(to_string(money.currency)) + " " + format_amount(money.cents);
}

std::optional<std::int64_t> parse_amount(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t whole = 0;
  std::size_t i = 0;
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    whole = whole * 10 + (text[i] - '0');
    any_digit = true;
    if (whole > 1'000'000'000'000LL) return std::nullopt;
  }
  std::int64_t frac = 0;
  if (i < text.size()) {
    if (text[i] != '.') return std::nullopt;
    ++i;
    std::size_t digits = 0;
    for (; i < text.size(); ++i, ++digits) {
      if (!std::isdigit(static_cast<unsigned char>(text[i])) || digits >= 2) return std::nullopt;
      frac = frac * 10 + (text[i] - '0');
      any_digit = true;
    }
    if (digits == 1) frac *= 10;
  }
  if (!any_digit) return std::nullopt;
  return whole * 100 + frac;
}

std::optional<std::string> profile_field(const UserProfile& p, std::string_view field) {
  if (field == "age") return std::string(to_string(p.age));
  if (field == "gender") return std::string(to_string(p.gender));
  if (field == "country") return p.country;
  if (field == "native") return std::string(to_string(p.native_speaker));
  if (field == "input") return p.input_method;
  if (field == "daily") return std::string(to_string(p.daily_sms));
  if (field == "years") return std::string(to_string(p.years_sms));
  if (field == "brand") return p.phone_brand;
  if (field == "model") return p.phone_model;
  if (field == "smartphone") return std::string(to_string(p.smartphone));
  return std::nullopt;
}

namespace {

std::string free_text_answer(std::string_view value) {
  std::string v = normalize_label(value);
  if (v.empty()) return std::string(kUnknown);
  return v;
}

TriState tri_state_answer(std::string_view value) {
  std::string v = normalize_label(value);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "yes" || v == "true" || v == "y") return TriState::yes;
  if (v == "no" || v == "false" || v == "n") return TriState::no;
  return TriState::unknown;
}

}  // namespace

bool set_profile_field(UserProfile& p, std::string_view field, std::string_view value) {
  if (field == "age") {
    p.age = parse_enum<AgeBucket>(value).value_or(AgeBucket::unknown);
  } else if (field == "gender") {
    p.gender = parse_enum<Gender>(value).value_or(Gender::unknown);
  } else if (field == "country") {
    p.country = free_text_answer(value);
  } else if (field == "native") {
    p.native_speaker = tri_state_answer(value);
  } else if (field == "input") {
    p.input_method = free_text_answer(value);
  } else if (field == "daily") {
    p.daily_sms = parse_enum<DailySmsBucket>(value).value_or(DailySmsBucket::unknown);
  } else if (field == "years") {
    p.years_sms = parse_enum<YearsSmsBucket>(value).value_or(YearsSmsBucket::unknown);
  } else if (field == "brand") {
    p.phone_brand = free_text_answer(value);
  } else if (field == "model") {
    p.phone_model = free_text_answer(value);
  } else if (field == "smartphone") {
    p.smartphone = tri_state_answer(value);
  } else {
    return false;
  }
  return true;
}

const SubmissionBatch* CorpusSnapshot::find_batch(std::string_view id) const {
  for (const auto& b : batches) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

const UserProfile* CorpusSnapshot::find_profile(std::string_view id) const {
  for (const auto& p : profiles) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

}  // namespace smscorpus
