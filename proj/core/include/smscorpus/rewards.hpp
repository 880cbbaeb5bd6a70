#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smscorpus/types.hpp"

namespace smscorpus {

/// Payment bracket: within [lower, upper] a contributor earns `base` plus one
/// currency unit per `divisor` messages beyond the bracket's accrual anchor.
struct RewardBracket {
  std::int64_t lower = 0;
  std::optional<std::int64_t> upper;    // nullopt = unbounded
  std::int64_t base_cents = 0;
  std::optional<std::int64_t> divisor;  // messages per currency unit; nullopt = no bonus

  bool operator==(const RewardBracket&) const = default;
};

/// Bracketed base + bonus scheme with a cap.
///
/// The accrual anchor of the first bracket is its lower bound; for every
/// later bracket it is the upper bound of the previous one. With that anchor
/// each bracket's base equals the previous bracket's maximum payout, which is
/// checked when a scheme is constructed.
class RewardScheme {
 public:
  /// Throws CorpusError(invalid_argument) when the brackets are not
  /// contiguous, not continuous, or the last bracket does not pay the cap.
  RewardScheme(std::string name, Currency currency,
               std::vector<RewardBracket> brackets, std::int64_t cap_cents);

  /// `lower upper base divisor` per line (`-` for unbounded / no bonus), then
  /// `cap <amount> <currency>`. '#' lines are comments.
  static RewardScheme parse(std::string_view text, std::string name);
  static RewardScheme load(const std::filesystem::path& path);

  std::string serialize() const;

  const std::string& name() const { return name_; }
  Currency currency() const { return currency_; }
  const std::vector<RewardBracket>& brackets() const { return brackets_; }
  std::int64_t cap_cents() const { return cap_cents_; }
  std::int64_t minimum() const { return brackets_.front().lower; }
  std::int64_t anchor(std::size_t bracket) const;

 private:
  std::string name_;
  Currency currency_;
  std::vector<RewardBracket> brackets_;
  std::int64_t cap_cents_;
};

struct RewardResult {
  Money amount;
  bool below_minimum = false;
  std::optional<std::size_t> bracket;
};

/// pay(n) = base_k + (n - anchor_k) / divisor_k, capped, rounded half-up to
/// cents. Below the scheme minimum the result is zero with the flag set.
RewardResult compute_reward(const RewardScheme& scheme, std::int64_t message_count);

/// Named schemes loaded from `*.scheme` files in a directory.
class SchemeRegistry {
 public:
  static SchemeRegistry load_directory(const std::filesystem::path& dir);

  void add(RewardScheme scheme);
  const RewardScheme* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, RewardScheme, std::less<>> schemes_;
};

/// USD value of one unit of each currency.
class FxTable {
 public:
  FxTable() = default;
  explicit FxTable(std::map<Currency, double> usd_rates);

  /// 23 Oct 2011 rates: 1 SGD = 0.7848 USD, 1 CNY = 0.1567 USD.
  static FxTable october_2011();
  /// `<CUR>=<usd rate>` lines.
  static FxTable parse(std::string_view text);

  double usd_rate(Currency currency) const;

 private:
  std::map<Currency, double> rates_{{Currency::USD, 1.0}};
};

struct CostPerMessage {
  Currency currency = Currency::USD;
  double native = 0.0;
  double usd = 0.0;
};

/// Throws CorpusError(invalid_argument) for a zero message count.
CostPerMessage cost_per_message(Money total_cost, std::int64_t message_count,
                                const FxTable& fx);

/// Rounds half away from zero to `decimals` places.
double round_to(double value, int decimals);

}  // namespace smscorpus
