#include "smscorpus/stats.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "smscorpus/error.hpp"
#include "smscorpus/rewards.hpp"
#include "smscorpus/utf8.hpp"

namespace smscorpus {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<Language, 2> kReportLanguages = {Language::english, Language::chinese};

std::vector<const Message*> approved(const CorpusSnapshot& corpus,
                                     std::optional<Language> language = std::nullopt) {
  std::vector<const Message*> out;
  for (const auto& m : corpus.messages) {
    if (m.status != Status::approved) continue;
    if (language && m.language != *language) continue;
    out.push_back(&m);
  }
  return out;
}

// Contributor of a message: the contributor reference of its batch.
std::string contributor_of(const CorpusSnapshot& corpus, const Message& m) {
  const SubmissionBatch* b = corpus.find_batch(m.batch_id);
  return b ? b->contributor_ref : "batch:" + m.batch_id;
}

double percent(std::size_t part, std::size_t whole) {
  if (whole == 0) return 0.0;
  return round_to(100.0 * static_cast<double>(part) / static_cast<double>(whole), 1);
}

template <typename E>
std::vector<std::string> enum_labels() {
  std::vector<std::string> out;
  for (const auto& [e, label] : EnumLabels<E>::table) out.emplace_back(label);
  return out;
}

// Fixed label order for enumerated fields; nullopt for free-text fields.
std::optional<std::vector<std::string>> dimension_labels(std::string_view dimension) {
  if (dimension == "age") return enum_labels<AgeBucket>();
  if (dimension == "gender") return enum_labels<Gender>();
  if (dimension == "native" || dimension == "smartphone") return enum_labels<TriState>();
  if (dimension == "daily") return enum_labels<DailySmsBucket>();
  if (dimension == "years") return enum_labels<YearsSmsBucket>();
  return std::nullopt;
}

Histogram make_histogram(std::string dimension, WeightBasis basis,
                         const std::map<std::string, std::size_t>& counts,
                         const std::optional<std::vector<std::string>>& fixed) {
  Histogram h;
  h.dimension = std::move(dimension);
  h.weight_basis = basis;
  if (fixed) {
    for (const auto& label : *fixed) {
      const auto it = counts.find(label);
      h.buckets.push_back({label, it == counts.end() ? 0 : it->second});
    }
    return h;
  }
  std::vector<HistogramBucket> free;
  std::size_t unknown = 0;
  for (const auto& [label, count] : counts) {
    if (label == kUnknown) {
      unknown = count;
    } else {
      free.push_back({label, count});
    }
  }
  std::stable_sort(free.begin(), free.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  h.buckets = std::move(free);
  h.buckets.push_back({std::string(kUnknown), unknown});
  return h;
}

Json histogram_json(const Histogram& h) {
  Json buckets = Json::array();
  for (const auto& b : h.buckets) {
    buckets.push_back({{"label", b.label}, {"count", b.count}, {"share", h.share(b.label)}});
  }
  return Json{{"dimension", h.dimension},
              {"weight_basis", to_string(h.weight_basis)},
              {"total", h.total()},
              {"buckets", std::move(buckets)}};
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

CorpusSummary corpus_summary(const CorpusSnapshot& corpus) {
  CorpusSummary s;
  std::map<Language, std::set<std::string>> contributors;
  std::set<std::string> all;
  for (Language l : enum_values<Language>()) s.by_language[l];
  for (const Message* m : approved(corpus)) {
    const std::string who = contributor_of(corpus, *m);
    ++s.by_language[m->language].messages;
    contributors[m->language].insert(who);
    all.insert(who);
    ++s.total_messages;
  }
  for (auto& [lang, summary] : s.by_language) {
    summary.contributors = contributors[lang].size();
    if (summary.contributors > 0) {
      summary.mean_per_contributor = round_to(
          static_cast<double>(summary.messages) / static_cast<double>(summary.contributors), 1);
    }
  }
  s.total_contributors = all.size();
  return s;
}

std::string_view to_string(WeightBasis basis) {
  return basis == WeightBasis::by_message ? "by_message" : "by_contributor";
}

std::size_t Histogram::total() const {
  std::size_t t = 0;
  for (const auto& b : buckets) t += b.count;
  return t;
}

double Histogram::share(std::string_view label) const { return percent(count(label), total()); }

std::size_t Histogram::count(std::string_view label) const {
  for (const auto& b : buckets) {
    if (b.label == label) return b.count;
  }
  return 0;
}

ContributorDistribution contributor_distribution(const CorpusSnapshot& corpus, Language language) {
  std::map<std::string, std::size_t> per_contributor;
  for (const Message* m : approved(corpus, language)) ++per_contributor[contributor_of(corpus, *m)];

  static const std::array<std::pair<std::size_t, const char*>, 5> kBins = {
      {{30, "1-30"}, {100, "31-100"}, {300, "101-300"}, {1000, "301-1000"}, {0, ">1000"}}};
  std::map<std::string, std::size_t> counts;
  ContributorDistribution d;
  for (const auto& [who, n] : per_contributor) {
    const char* label = kBins.back().second;
    for (std::size_t i = 0; i + 1 < kBins.size(); ++i) {
      if (n <= kBins[i].first) {
        label = kBins[i].second;
        break;
      }
    }
    ++counts[label];
    if (n < 30) ++d.below_30;
  }
  std::vector<std::string> labels;
  for (const auto& [edge, label] : kBins) labels.emplace_back(label);
  labels.emplace_back(kUnknown);
  d.histogram = make_histogram("messages_per_contributor", WeightBasis::by_contributor, counts,
                               labels);
  d.contributors = per_contributor.size();
  if (d.contributors > 0) d.below_30_percent = percent(d.below_30, d.contributors);
  return d;
}

Histogram breakdown(const CorpusSnapshot& corpus, std::string_view dimension, WeightBasis basis,
                    std::optional<Language> language) {
  if (std::find(kProfileFields.begin(), kProfileFields.end(), dimension) == kProfileFields.end()) {
    throw CorpusError(ErrorCode::invalid_argument,
                      "unknown dimension " + std::string(dimension));
  }
  auto value_of = [&](const Message& m) -> std::string {
    if (!m.profile_id) return std::string(kUnknown);
    const UserProfile* p = corpus.find_profile(*m.profile_id);
    if (!p) return std::string(kUnknown);
    return *profile_field(*p, dimension);
  };

  std::map<std::string, std::size_t> counts;
  if (basis == WeightBasis::by_message) {
    for (const Message* m : approved(corpus, language)) ++counts[value_of(*m)];
  } else {
    // A contributor is classified by the profile on their lowest-id message.
    std::map<std::string, const Message*> first;
    for (const Message* m : approved(corpus, language)) {
      auto [it, inserted] = first.emplace(contributor_of(corpus, *m), m);
      if (!inserted && m->id < it->second->id) it->second = m;
    }
    for (const auto& [who, m] : first) ++counts[value_of(*m)];
  }
  return make_histogram(std::string(dimension), basis, counts, dimension_labels(dimension));
}

MethodSourceTables method_source_tables(const CorpusSnapshot& corpus) {
  MethodSourceTables t;
  std::map<Source, std::map<Language, std::set<std::string>>> source_people;
  std::map<Language, std::set<std::string>> total_people;
  for (Language l : enum_values<Language>()) {
    for (CollectionMethod c : enum_values<CollectionMethod>()) t.by_method[c][l] = 0;
    for (Source s : enum_values<Source>()) t.by_source[s][l] = {0, 0};
    t.totals[l] = {0, 0};
  }
  for (const Message* m : approved(corpus)) {
    const std::string who = contributor_of(corpus, *m);
    ++t.by_method[m->collection_method][m->language];
    ++t.by_source[m->source][m->language].first;
    source_people[m->source][m->language].insert(who);
    ++t.totals[m->language].first;
    total_people[m->language].insert(who);
  }
  for (auto& [source, langs] : t.by_source) {
    for (auto& [lang, cell] : langs) cell.second = source_people[source][lang].size();
  }
  for (auto& [lang, cell] : t.totals) cell.second = total_people[lang].size();
  return t;
}

std::size_t count_tokens(std::string_view body, Language language) {
  const auto cps = utf8::decode(body);
  std::size_t tokens = 0;
  bool in_run = false;
  const bool cjk_tokens = language == Language::chinese || language == Language::mixed;
  for (char32_t cp : cps) {
    if (utf8::is_space(cp)) {
      in_run = false;
    } else if (cjk_tokens && utf8::is_cjk(cp)) {
      ++tokens;
      in_run = false;
    } else if (!in_run) {
      ++tokens;
      in_run = true;
    }
  }
  return tokens;
}

LengthStats length_stats(const CorpusSnapshot& corpus, Language language) {
  LengthStats s;
  s.token_definition = language == Language::chinese || language == Language::mixed
                           ? "cjk_character_or_non_space_run"
                           : "whitespace_delimited_word";
  std::size_t chars = 0;
  std::size_t tokens = 0;
  for (const Message* m : approved(corpus, language)) {
    ++s.messages;
    chars += utf8::codepoint_count(m->body);
    tokens += count_tokens(m->body, language);
  }
  if (s.messages > 0) {
    s.mean_chars = round_to(static_cast<double>(chars) / static_cast<double>(s.messages), 1);
    s.mean_tokens = round_to(static_cast<double>(tokens) / static_cast<double>(s.messages), 1);
  }
  return s;
}

std::string stats_report_json(const CorpusSnapshot& corpus,
                              std::optional<std::string_view> version_id) {
  Json doc;
  doc["format"] = "smscorpus-stats/1";
  doc["version"] = version_id ? Json(std::string(*version_id)) : Json(nullptr);

  const CorpusSummary summary = corpus_summary(corpus);
  Json langs = Json::object();
  for (const auto& [lang, s] : summary.by_language) {
    langs[std::string(to_string(lang))] = {{"messages", s.messages},
                                           {"contributors", s.contributors},
                                           {"mean_per_contributor",
                                            optional_number(s.mean_per_contributor)}};
  }
  doc["summary"] = {{"total_messages", summary.total_messages},
                    {"total_contributors", summary.total_contributors},
                    {"languages", std::move(langs)}};

  Json dist = Json::object();
  for (Language lang : kReportLanguages) {
    const auto d = contributor_distribution(corpus, lang);
    dist[std::string(to_string(lang))] = {{"contributors", d.contributors},
                                          {"below_30", d.below_30},
                                          {"below_30_percent", optional_number(d.below_30_percent)},
                                          {"histogram", histogram_json(d.histogram)}};
  }
  doc["contributor_distribution"] = std::move(dist);

  Json breakdowns = Json::object();
  for (Language lang : kReportLanguages) {
    Json per_basis = Json::object();
    for (WeightBasis basis : {WeightBasis::by_message, WeightBasis::by_contributor}) {
      Json fields = Json::object();
      for (auto field : kProfileFields) {
        fields[std::string(field)] = histogram_json(breakdown(corpus, field, basis, lang));
      }
      per_basis[std::string(to_string(basis))] = std::move(fields);
    }
    breakdowns[std::string(to_string(lang))] = std::move(per_basis);
  }
  doc["breakdowns"] = std::move(breakdowns);

  const auto tables = method_source_tables(corpus);
  Json methods = Json::object();
  for (const auto& [method, langs_map] : tables.by_method) {
    Json row = Json::object();
    for (const auto& [lang, n] : langs_map) row[std::string(to_string(lang))] = n;
    methods[std::string(to_string(method))] = std::move(row);
  }
  Json sources = Json::object();
  for (const auto& [source, langs_map] : tables.by_source) {
    Json row = Json::object();
    for (const auto& [lang, cell] : langs_map) {
      row[std::string(to_string(lang))] = {{"messages", cell.first}, {"contributors", cell.second}};
    }
    sources[std::string(to_string(source))] = std::move(row);
  }
  doc["methods"] = std::move(methods);
  doc["sources"] = std::move(sources);

  Json lengths = Json::object();
  for (Language lang : kReportLanguages) {
    const auto l = length_stats(corpus, lang);
    lengths[std::string(to_string(lang))] = {{"messages", l.messages},
                                             {"mean_chars", l.mean_chars},
                                             {"mean_tokens", l.mean_tokens},
                                             {"token_definition", l.token_definition}};
  }
  doc["length"] = std::move(lengths);
  return doc.dump(2) + "\n";
}

}  // namespace smscorpus
