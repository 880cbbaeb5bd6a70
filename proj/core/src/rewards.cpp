#include "smscorpus/rewards.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "smscorpus/config.hpp"
#include "smscorpus/error.hpp"

namespace smscorpus {

namespace {

[[noreturn]] void bad_scheme(const std::string& name, const std::string& what) {
  throw CorpusError(ErrorCode::invalid_argument, "scheme " + name + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<std::int64_t> parse_count(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

// (num / den) rounded half-up, for non-negative operands.
std::int64_t div_half_up(std::int64_t num, std::int64_t den) { return (2 * num + den) / (2 * den); }

}  // namespace

RewardScheme::RewardScheme(std::string name, Currency currency,
                           std::vector<RewardBracket> brackets, std::int64_t cap_cents)
    : name_(std::move(name)),
      currency_(currency),
      brackets_(std::move(brackets)),
      cap_cents_(cap_cents) {
  if (brackets_.empty()) bad_scheme(name_, "no brackets");
  if (cap_cents_ <= 0) bad_scheme(name_, "cap must be positive");
  if (brackets_.front().lower < 1) bad_scheme(name_, "minimum must be at least 1");
  for (std::size_t k = 0; k < brackets_.size(); ++k) {
    const RewardBracket& b = brackets_[k];
    const bool last = k + 1 == brackets_.size();
    if (b.base_cents < 0) bad_scheme(name_, "negative base");
    if (last) {
      if (b.upper) bad_scheme(name_, "last bracket must be unbounded");
      if (b.divisor) bad_scheme(name_, "last bracket must not pay a bonus");
      if (b.base_cents != cap_cents_) bad_scheme(name_, "last bracket base must equal the cap");
      continue;
    }
    if (!b.upper || *b.upper < b.lower) bad_scheme(name_, "bracket upper bound below lower bound");
    if (!b.divisor || *b.divisor <= 0) bad_scheme(name_, "inner bracket needs a positive divisor");
    const RewardBracket& next = brackets_[k + 1];
    if (next.lower != *b.upper + 1) bad_scheme(name_, "brackets are not contiguous");
    // pay(upper_k) must equal base_{k+1} within half a cent.
    const std::int64_t accrued = (*b.upper - anchor(k)) * 100;
    const std::int64_t diff2 = 2 * (b.base_cents * *b.divisor + accrued - next.base_cents * *b.divisor);
    if (diff2 >= *b.divisor || diff2 <= -*b.divisor) {
      bad_scheme(name_, "bracket " + std::to_string(k + 1) + " is not continuous with the next");
    }
  }
}

std::int64_t RewardScheme::anchor(std::size_t bracket) const {
  if (bracket == 0) return brackets_.front().lower;
  return *brackets_.at(bracket - 1).upper;
}

RewardScheme RewardScheme::parse(std::string_view text, std::string name) {
  std::vector<RewardBracket> brackets;
  std::optional<std::int64_t> cap;
  std::optional<Currency> currency;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fields = split_ws(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (cap) bad_scheme(name, where + ": content after the cap line");
    if (fields.front() == "cap") {
      if (fields.size() != 3) bad_scheme(name, where + ": expected 'cap <amount> <currency>'");
      cap = parse_amount(fields[1]);
      currency = parse_enum<Currency>(fields[2]);
      if (!cap || !currency) bad_scheme(name, where + ": bad cap");
      continue;
    }
    if (fields.size() != 4) bad_scheme(name, where + ": expected 'lower upper base divisor'");
    RewardBracket b;
    const auto lower = parse_count(fields[0]);
    const auto base = parse_amount(fields[2]);
    if (!lower || !base) bad_scheme(name, where + ": bad bracket");
    b.lower = *lower;
    b.base_cents = *base;
    if (fields[1] != "-") {
      b.upper = parse_count(fields[1]);
      if (!b.upper) bad_scheme(name, where + ": bad upper bound");
    }
    if (fields[3] != "-") {
      b.divisor = parse_count(fields[3]);
      if (!b.divisor) bad_scheme(name, where + ": bad divisor");
    }
    brackets.push_back(b);
  }
  if (!cap) bad_scheme(name, "missing cap line");
  return RewardScheme(std::move(name), *currency, std::move(brackets), *cap);
}

RewardScheme RewardScheme::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.stem().string());
}

std::string RewardScheme::serialize() const {
  std::ostringstream out;
  for (const auto& b : brackets_) {
    out << b.lower << ' ' << (b.upper ? std::to_string(*b.upper) : "-") << ' '
        << format_amount(b.base_cents) << ' ' << (b.divisor ? std::to_string(*b.divisor) : "-")
        << '\n';
  }
  out << "cap " << format_amount(cap_cents_) << ' ' << to_string(currency_) << '\n';
  return out.str();
}

RewardResult compute_reward(const RewardScheme& scheme, std::int64_t message_count) {
  RewardResult result;
  result.amount.currency = scheme.currency();
  if (message_count < scheme.minimum()) {
    result.below_minimum = true;
    return result;
  }
  const auto& brackets = scheme.brackets();
  std::size_t k = 0;
  while (k + 1 < brackets.size() && message_count > *brackets[k].upper) ++k;
  const RewardBracket& b = brackets[k];
  std::int64_t cents = b.base_cents;
  if (b.divisor) cents += div_half_up((message_count - scheme.anchor(k)) * 100, *b.divisor);
  result.amount.cents = std::min(cents, scheme.cap_cents());
  result.bracket = k;
  return result;
}

SchemeRegistry SchemeRegistry::load_directory(const std::filesystem::path& dir) {
  SchemeRegistry reg;
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scheme") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw CorpusError(ErrorCode::io, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) reg.add(RewardScheme::load(f));
  return reg;
}

void SchemeRegistry::add(RewardScheme scheme) {
  std::string key = scheme.name();
  schemes_.insert_or_assign(std::move(key), std::move(scheme));
}

const RewardScheme* SchemeRegistry::find(std::string_view name) const {
  const auto it = schemes_.find(name);
  return it == schemes_.end() ? nullptr : &it->second;
}

std::vector<std::string> SchemeRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, scheme] : schemes_) out.push_back(name);
  return out;
}

FxTable::FxTable(std::map<Currency, double> usd_rates) {
  for (const auto& [currency, rate] : usd_rates) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw CorpusError(ErrorCode::invalid_argument,
                        "fx rate for " + std::string(to_string(currency)) + " must be positive");
    }
    rates_[currency] = rate;
  }
}

FxTable FxTable::october_2011() {
  return FxTable({{Currency::SGD, 0.7848}, {Currency::CNY, 0.1567}});
}

FxTable FxTable::parse(std::string_view text) {
  std::map<Currency, double> rates;
  for (const auto& [key, value] : parse_key_values(text)) {
    const auto currency = parse_enum<Currency>(key);
    double rate = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), rate);
    if (!currency || ec != std::errc() || ptr != value.data() + value.size()) {
      throw CorpusError(ErrorCode::invalid_argument, "bad fx line " + key + "=" + value);
    }
    rates[*currency] = rate;
  }
  return FxTable(std::move(rates));
}

double FxTable::usd_rate(Currency currency) const {
  const auto it = rates_.find(currency);
  if (it == rates_.end()) {
    throw CorpusError(ErrorCode::not_found,
                      "no fx rate for " + std::string(to_string(currency)));
  }
  return it->second;
}

CostPerMessage cost_per_message(Money total_cost, std::int64_t message_count, const FxTable& fx) {
  if (message_count <= 0) {
    throw CorpusError(ErrorCode::invalid_argument, "message count must be positive");
  }
  CostPerMessage out;
  out.currency = total_cost.currency;
  out.native = static_cast<double>(total_cost.cents) / 100.0 / static_cast<double>(message_count);
  out.usd = out.native * fx.usd_rate(total_cost.currency);
  return out;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

}  // namespace smscorpus
