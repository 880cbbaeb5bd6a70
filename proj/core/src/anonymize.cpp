#include "smscorpus/anonymize.hpp"

#include <algorithm>

#include "smscorpus/config.hpp"
#include "smscorpus/crypto.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/ingest.hpp"
#include "smscorpus/utf8.hpp"

namespace smscorpus {

namespace {

constexpr std::array<ScrubRule, 9> kRules{{
    {ScrubRuleName::email, "email",
     R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,})", kEmailCode},
    {ScrubRuleName::url, "url",
     R"((?:[Hh][Tt][Tt][Pp][Ss]?://|[Ff][Tt][Pp]://|[Ww]{3}\.)[A-Za-z0-9\-._~:/?#\[\]@!$&()*+,;=%]*[A-Za-z0-9/_~#=&%+\-*$@])",
     kUrlCode},
    {ScrubRuleName::ip, "ip", R"((?<!\d)\d{1,3}(?:\.\d{1,3}){3}(?!\d))", kIpCode},
    {ScrubRuleName::date, "date",
     R"((?<!\d)(?:\d{1,2}/\d{1,2}/(?:\d{4}|\d{2})|\d{4}-\d{1,2}-\d{1,2})(?!\d))", kDateCode},
    {ScrubRuleName::time, "time",
     R"((?<!\d)\d{1,2}:\d{2}(?!\d)(?: ?[AaPp][Mm](?![A-Za-z]))?)", kTimeCode},
    {ScrubRuleName::decimal, "decimal", R"((?<!\d)\d+\.\d+(?!\d))", kDecimalCode},
    // Additionally at least one group must have two or more digits.
    {ScrubRuleName::hyphen_number, "hyphen_number", R"((?<!\d)\d+(?:-\d+)+(?!\d))",
     kNumberCode},
    // Digit run touching a letter on either side; only the digits are replaced.
    {ScrubRuleName::alphanumeric, "alphanumeric",
     R"((?<=[A-Za-z])\d{2,}(?!\d)|(?<!\d)\d{2,}(?=[A-Za-z]))", kNumberCode},
    {ScrubRuleName::integer, "integer", R"((?<!\d)\d{2,}(?!\d))", kNumberCode},
}};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_alnum(char c) { return is_digit(c) || is_alpha(c); }

bool is_email_local(char c) {
  return is_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}
bool is_domain_char(char c) { return is_alnum(c) || c == '-' || c == '.'; }

bool is_url_char(char c) {
  if (is_alnum(c)) return true;
  switch (c) {
    case '-': case '.': case '_': case '~': case ':': case '/': case '?': case '#':
    case '[': case ']': case '@': case '!': case '$': case '&': case '(': case ')':
    case '*': case '+': case ',': case ';': case '=': case '%':
      return true;
    default:
      return false;
  }
}

bool is_url_final(char c) {
  if (is_alnum(c)) return true;
  switch (c) {
    case '/': case '_': case '~': case '#': case '=': case '&': case '%': case '+':
    case '-': case '*': case '$': case '@':
      return true;
    default:
      return false;
  }
}

std::size_t digit_run(std::string_view t, std::size_t pos) {
  std::size_t i = pos;
  while (i < t.size() && is_digit(t[i])) ++i;
  return i - pos;
}

bool digit_boundary_left(std::string_view t, std::size_t pos) {
  return pos == 0 || !is_digit(t[pos - 1]);
}

bool iequals_prefix(std::string_view t, std::size_t pos, std::string_view prefix) {
  if (t.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = t[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

bool valid_domain(std::string_view d) {
  std::size_t labels = 0;
  std::string_view last;
  while (true) {
    const std::size_t dot = d.find('.');
    const std::string_view label = d.substr(0, dot);
    if (label.empty()) return false;
    for (char c : label) {
      if (!is_alnum(c) && c != '-') return false;
    }
    ++labels;
    last = label;
    if (dot == std::string_view::npos) break;
    d.remove_prefix(dot + 1);
  }
  if (labels < 2 || last.size() < 2) return false;
  return std::all_of(last.begin(), last.end(), is_alpha);
}

std::size_t match_email(std::string_view t, std::size_t i) {
  std::size_t j = i;
  while (j < t.size() && is_email_local(t[j])) ++j;
  if (j == i || j >= t.size() || t[j] != '@') return 0;
  const std::size_t at = j;
  std::size_t k = at + 1;
  while (k < t.size() && is_domain_char(t[k])) ++k;
  for (std::size_t e = k; e >= at + 4; --e) {
    if (valid_domain(t.substr(at + 1, e - at - 1))) return e - i;
  }
  return 0;
}

std::size_t match_url(std::string_view t, std::size_t i) {
  std::size_t prefix = 0;
  if (iequals_prefix(t, i, "https://")) {
    prefix = 8;
  } else if (iequals_prefix(t, i, "http://")) {
    prefix = 7;
  } else if (iequals_prefix(t, i, "ftp://")) {
    prefix = 6;
  } else if (iequals_prefix(t, i, "www.")) {
    prefix = 4;
  } else {
    return 0;
  }
  std::size_t e = i + prefix;
  while (e < t.size() && is_url_char(t[e])) ++e;
  while (e > i + prefix && !is_url_final(t[e - 1])) --e;
  return e > i + prefix ? e - i : 0;
}

std::size_t match_ip(std::string_view t, std::size_t i) {
  if (!digit_boundary_left(t, i)) return 0;
  std::size_t p = i;
  for (int group = 0; group < 4; ++group) {
    if (group > 0) {
      if (p >= t.size() || t[p] != '.') return 0;
      ++p;
    }
    const std::size_t run = digit_run(t, p);
    if (run < 1 || run > 3) return 0;
    p += run;
  }
  return p - i;
}

std::size_t match_date(std::string_view t, std::size_t i) {
  if (!digit_boundary_left(t, i)) return 0;
  const std::size_t r1 = digit_run(t, i);
  if (r1 == 0) return 0;
  std::size_t p = i + r1;
  if (r1 <= 2 && p < t.size() && t[p] == '/') {
    const std::size_t r2 = digit_run(t, p + 1);
    const std::size_t q = p + 1 + r2;
    if (r2 >= 1 && r2 <= 2 && q < t.size() && t[q] == '/') {
      const std::size_t r3 = digit_run(t, q + 1);
      if (r3 == 2 || r3 == 4) return q + 1 + r3 - i;
    }
    return 0;
  }
  if (r1 == 4 && p < t.size() && t[p] == '-') {
    const std::size_t r2 = digit_run(t, p + 1);
    const std::size_t q = p + 1 + r2;
    if (r2 >= 1 && r2 <= 2 && q < t.size() && t[q] == '-') {
      const std::size_t r3 = digit_run(t, q + 1);
      if (r3 >= 1 && r3 <= 2) return q + 1 + r3 - i;
    }
  }
  return 0;
}

std::size_t match_time(std::string_view t, std::size_t i) {
  if (!digit_boundary_left(t, i)) return 0;
  const std::size_t r1 = digit_run(t, i);
  if (r1 < 1 || r1 > 2) return 0;
  std::size_t p = i + r1;
  if (p >= t.size() || t[p] != ':') return 0;
  if (digit_run(t, p + 1) != 2) return 0;
  p += 3;
  std::size_t q = p;
  if (q < t.size() && t[q] == ' ') ++q;
  if (q + 1 < t.size() && (t[q] == 'a' || t[q] == 'A' || t[q] == 'p' || t[q] == 'P') &&
      (t[q + 1] == 'm' || t[q + 1] == 'M') && (q + 2 >= t.size() || !is_alpha(t[q + 2]))) {
    p = q + 2;
  }
  return p - i;
}

std::size_t match_decimal(std::string_view t, std::size_t i) {
  if (!digit_boundary_left(t, i)) return 0;
  const std::size_t r1 = digit_run(t, i);
  if (r1 == 0) return 0;
  const std::size_t p = i + r1;
  if (p >= t.size() || t[p] != '.') return 0;
  const std::size_t r2 = digit_run(t, p + 1);
  return r2 == 0 ? 0 : p + 1 + r2 - i;
}

std::size_t match_hyphen_number(std::string_view t, std::size_t i) {
  if (!digit_boundary_left(t, i)) return 0;
  std::size_t run = digit_run(t, i);
  if (run == 0) return 0;
  std::size_t p = i + run;
  std::size_t groups = 1;
  bool long_group = run >= 2;
  while (p + 1 < t.size() && t[p] == '-' && is_digit(t[p + 1])) {
    run = digit_run(t, p + 1);
    long_group = long_group || run >= 2;
    p += 1 + run;
    ++groups;
  }
  return groups >= 2 && long_group ? p - i : 0;
}

std::size_t match_alphanumeric(std::string_view t, std::size_t i) {
  if (!digit_boundary_left(t, i)) return 0;
  const std::size_t run = digit_run(t, i);
  if (run < 2) return 0;
  const bool letter_before = i > 0 && is_alpha(t[i - 1]);
  const bool letter_after = i + run < t.size() && is_alpha(t[i + run]);
  return letter_before || letter_after ? run : 0;
}

std::size_t match_integer(std::string_view t, std::size_t i) {
  if (!digit_boundary_left(t, i)) return 0;
  const std::size_t run = digit_run(t, i);
  return run >= 2 ? run : 0;
}

// Runs one rule over the whole text, left to right, non-overlapping.
std::string apply_rule(const ScrubRule& rule, std::string_view text, std::size_t& count) {
  if (rule.name == ScrubRuleName::email && text.find('@') == std::string_view::npos) return std::string(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (rule.name == ScrubRuleName::email && !is_email_local(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    const std::size_t len = match_rule_at(rule.name, text, i);
    if (len > 0) {
      out.append(rule.replacement);
      i += len;
      ++count;
      continue;
    }
    if (rule.name == ScrubRuleName::email) {
      // No address starts anywhere in this run of local-part characters
      // unless the run reaches an '@', so skip it whole.
      std::size_t j = i;
      while (j < text.size() && is_email_local(text[j])) ++j;
      if (j >= text.size() || text[j] != '@') {
        out.append(text.substr(i, j - i));
        i = j;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

}  // namespace

const std::array<ScrubRule, 9>& scrub_rules() { return kRules; }

std::size_t match_rule_at(ScrubRuleName rule, std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  switch (rule) {
    case ScrubRuleName::email: return match_email(text, pos);
    case ScrubRuleName::url: return match_url(text, pos);
    case ScrubRuleName::ip: return match_ip(text, pos);
    case ScrubRuleName::date: return match_date(text, pos);
    case ScrubRuleName::time: return match_time(text, pos);
    case ScrubRuleName::decimal: return match_decimal(text, pos);
    case ScrubRuleName::hyphen_number: return match_hyphen_number(text, pos);
    case ScrubRuleName::alphanumeric: return match_alphanumeric(text, pos);
    case ScrubRuleName::integer: return match_integer(text, pos);
  }
  return 0;
}

std::string normalize_fullwidth_digits(std::string_view text) {
  // U+FF10..U+FF19 are EF BC 90..99 in UTF-8.
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xEF &&
        static_cast<unsigned char>(text[i + 1]) == 0xBC) {
      const auto third = static_cast<unsigned char>(text[i + 2]);
      if (third >= 0x90 && third <= 0x99) {
        out.push_back(static_cast<char>('0' + (third - 0x90)));
        i += 2;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

std::size_t ScrubResult::total_replacements() const {
  std::size_t n = 0;
  for (std::size_t c : replacements) n += c;
  return n;
}

ScrubResult scrub_body_detailed(std::string_view text) {
  ScrubResult result;
  result.text = normalize_fullwidth_digits(text);
  for (const auto& rule : kRules) {
    result.text = apply_rule(rule, result.text,
                             result.replacements[static_cast<std::size_t>(rule.name)]);
  }
  return result;
}

std::string scrub_body(std::string_view text) { return scrub_body_detailed(text).text; }

std::optional<ResidualMatch> find_residual(std::string_view text) {
  const std::string normalized = normalize_fullwidth_digits(text);
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    for (const auto& rule : kRules) {
      if (const std::size_t len = match_rule_at(rule.name, normalized, i); len > 0) {
        return ResidualMatch{rule.name, i, len};
      }
    }
  }
  return std::nullopt;
}

EmoticonTable::EmoticonTable(std::vector<std::pair<std::string, std::string>> entries)
    : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
}

const EmoticonTable& EmoticonTable::builtin() {
  static const EmoticonTable table({
      {":-)", ":)"},  {"=)", ":)"},   {":]", ":)"},   {":-]", ":)"},  {"=]", ":)"},
      {":-(", ":("},  {"=(", ":("},   {":-[", ":("},  {":-D", ":D"},  {"=D", ":D"},
      {";-)", ";)"},  {":-P", ":P"},  {":-p", ":P"},  {":-O", ":O"},  {":-o", ":O"},
      {":'-(", ":'("}, {":-/", ":/"}, {":-|", ":|"},  {":-*", ":*"},
  });
  return table;
}

EmoticonTable EmoticonTable::parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t sp = line.find_first_of(" \t");
    if (sp == std::string_view::npos) {
      throw CorpusError(ErrorCode::malformed,
                        "emoticon table line " + std::to_string(line_no) + " needs two fields");
    }
    std::string_view canonical = line.substr(sp);
    while (!canonical.empty() && (canonical.front() == ' ' || canonical.front() == '\t'))
      canonical.remove_prefix(1);
    if (canonical.empty() || canonical.find_first_of(" \t") != std::string_view::npos) {
      throw CorpusError(ErrorCode::malformed,
                        "emoticon table line " + std::to_string(line_no) + " needs two fields");
    }
    entries.emplace_back(std::string(line.substr(0, sp)), std::string(canonical));
  }
  return EmoticonTable(std::move(entries));
}

EmoticonTable EmoticonTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

std::string EmoticonTable::normalize(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    bool replaced = false;
    for (const auto& [variant, canonical] : entries_) {
      if (text.compare(i, variant.size(), variant) == 0) {
        // A variant ending in a letter must not swallow the start of a word.
        const std::size_t end = i + variant.size();
        if (is_alnum(variant.back()) && end < text.size() && is_alnum(text[end])) continue;
        out += canonical;
        i += variant.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(text[i++]);
  }
  return out;
}

PseudonymKey PseudonymKey::from_hex(std::string_view hex) {
  const auto bytes = crypto::from_hex(hex);
  if (!bytes || bytes->size() != kPseudonymKeyBytes) {
    throw CorpusError(ErrorCode::invalid_argument,
                      "pseudonym key must be " + std::to_string(kPseudonymKeyBytes * 2) +
                          " hex characters");
  }
  PseudonymKey key;
  key.key_bytes = *bytes;
  key.key_id = crypto::sha256_hex(std::string_view(
                                      reinterpret_cast<const char*>(bytes->data()), bytes->size()))
                   .substr(0, 8);
  return key;
}

std::string normalize_phone(std::string_view phone_text) {
  const std::string digits = normalize_fullwidth_digits(phone_text);
  std::string out;
  out.reserve(digits.size());
  for (char c : digits) {
    if (c == ' ' || c == '-' || c == '.' || c == '(' || c == ')' || c == '\t') continue;
    if (c == '+' && !out.empty()) continue;
    out.push_back(c);
  }
  return out;
}

std::string pseudonymize_number(std::string_view phone_text, const PseudonymKey& key) {
  const std::string normalized = normalize_phone(phone_text);
  if (normalized.empty() || normalized == "+") {
    throw CorpusError(ErrorCode::invalid_argument, "empty phone number");
  }
  const auto tag = crypto::hmac_sha256(key.key_bytes, "phone\x1f" + normalized);
  return "P" + crypto::to_hex(std::span<const std::uint8_t>(tag.data(), 8));
}

bool looks_like_phone_number(std::string_view text) {
  const std::string n = normalize_phone(text);
  std::string_view digits = n;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  return digits.size() >= 5 && digits.size() <= 15 &&
         std::all_of(digits.begin(), digits.end(), is_digit);
}

Message anonymize_message(const RawMessage& raw, const PseudonymKey& key,
                          const EmoticonTable& emoticons) {
  Message m;
  m.body = scrub_body(emoticons.normalize(utf8::sanitize(raw.body_raw)));
  if (raw.sender_raw) m.sender_token = pseudonymize_number(*raw.sender_raw, key);
  if (raw.receiver_raw) m.receiver_token = pseudonymize_number(*raw.receiver_raw, key);
  m.sent_at = raw.sent_at;
  return m;
}

}  // namespace smscorpus
