#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/stats.hpp"

using namespace smscorpus;
using Spec = fixtures::CorpusBuilder::Spec;

TEST_CASE("summary over the reference totals") {
  const auto corpus = fixtures::reference_totals_corpus();
  const auto s = corpus_summary(corpus);
  const auto& en = s.by_language.at(Language::english);
  const auto& zh = s.by_language.at(Language::chinese);
  CHECK(en.messages == 28724);
  CHECK(en.contributors == 116);
  CHECK(*en.mean_per_contributor == doctest::Approx(247.6).epsilon(1e-9));
  CHECK(zh.messages == 29100);
  CHECK(zh.contributors == 515);
  CHECK(*zh.mean_per_contributor == doctest::Approx(56.5).epsilon(1e-9));
  CHECK(s.total_messages == 57824);
}

TEST_CASE("empty corpus") {
  const CorpusSnapshot empty;
  const auto s = corpus_summary(empty);
  CHECK(s.total_messages == 0);
  CHECK_FALSE(s.by_language.at(Language::english).mean_per_contributor);
  const auto d = contributor_distribution(empty, Language::english);
  CHECK(d.contributors == 0);
  CHECK_FALSE(d.below_30_percent);
  const auto t = method_source_tables(empty);
  for (const auto& [method, row] : t.by_method) {
    for (const auto& [lang, n] : row) CHECK(n == 0);
  }
  CHECK(t.totals.at(Language::english) == std::pair<std::size_t, std::size_t>{0, 0});
  const auto doc = nlohmann::json::parse(stats_report_json(empty));
  CHECK(doc["summary"]["total_messages"] == 0);
}

TEST_CASE("contributor distribution") {
  const auto corpus = fixtures::reference_totals_corpus();
  const auto d = contributor_distribution(corpus, Language::english);
  CHECK(d.contributors == 116);
  CHECK(d.below_30 == 63);
  CHECK(*d.below_30_percent == doctest::Approx(54.3).epsilon(1e-9));
  CHECK(d.histogram.count("1-30") == 63);
  CHECK(d.histogram.buckets.back().label == "unknown");

  fixtures::CorpusBuilder one;
  one.add_batch(10, Spec{});
  const auto single = contributor_distribution(one.snapshot(), Language::english);
  CHECK(single.histogram.total() == 1);
  CHECK(single.histogram.count("1-30") == 1);
}

TEST_CASE("demographic breakdowns") {
  const auto corpus = fixtures::reference_totals_corpus();
  const auto age = breakdown(corpus, "age", WeightBasis::by_message, Language::english);
  CHECK(age.share("21-25") == doctest::Approx(56.9).epsilon(1e-9));
  const auto gender = breakdown(corpus, "gender", WeightBasis::by_message, Language::english);
  CHECK(gender.share("female") == doctest::Approx(16.1).epsilon(1e-9));
  CHECK(gender.share("male") == doctest::Approx(71.1).epsilon(1e-9));
  CHECK(gender.share("unknown") == doctest::Approx(12.8).epsilon(1e-9));
  const auto by_person = breakdown(corpus, "gender", WeightBasis::by_contributor, Language::english);
  CHECK(by_person.total() == 116);
  CHECK(by_person.count("female") == 8);

  const auto zh_age = breakdown(corpus, "age", WeightBasis::by_message, Language::chinese);
  CHECK(zh_age.share("unknown") == 100.0);
  CHECK_THROWS_AS(breakdown(corpus, "shoe_size", WeightBasis::by_message), CorpusError);
}

TEST_CASE("method and source tables") {
  const auto corpus = fixtures::reference_totals_corpus();
  const auto t = method_source_tables(corpus);
  CHECK(t.by_method.at(CollectionMethod::transcription).at(Language::english) == 480);
  CHECK(t.by_method.at(CollectionMethod::export_archive).at(Language::english) == 11104);
  CHECK(t.by_method.at(CollectionMethod::upload).at(Language::english) == 17140);
  CHECK(t.by_method.at(CollectionMethod::transcription).at(Language::chinese) == 15753);
  CHECK(t.by_method.at(CollectionMethod::export_archive).at(Language::chinese) == 12344);
  CHECK(t.by_method.at(CollectionMethod::upload).at(Language::chinese) == 1003);
  CHECK(t.totals.at(Language::english) == std::pair<std::size_t, std::size_t>{28724, 116});
  std::size_t messages = 0;
  std::size_t contributors = 0;
  for (const auto& [source, row] : t.by_source) {
    messages += row.at(Language::english).first;
    contributors += row.at(Language::english).second;
  }
  CHECK(messages == 28724);
  CHECK(contributors == 116);
}

TEST_CASE("only approved messages count") {
  fixtures::CorpusBuilder b;
  b.add_batch(5, Spec{});
  Spec rejected;
  rejected.status = Status::rejected;
  b.add_batch(7, rejected);
  Spec pending;
  pending.status = Status::pending;
  b.add_batch(9, pending);
  CHECK(corpus_summary(b.snapshot()).total_messages == 5);
}

TEST_CASE("tokens and lengths") {
  CHECK(count_tokens("see you at <TIME>", Language::english) == 4);
  CHECK(count_tokens("你好吗", Language::chinese) == 3);
  CHECK(count_tokens("我们<#>点见", Language::chinese) == 5);
  CHECK(count_tokens("", Language::english) == 0);

  CorpusSnapshot s;
  fixtures::CorpusBuilder b;
  b.add_batch(2, Spec{});
  s = b.snapshot();
  s.messages[0].body = "one two three";
  s.messages[1].body = "one two three four five";
  const auto l = length_stats(s, Language::english);
  CHECK(l.messages == 2);
  CHECK(l.mean_tokens == doctest::Approx(4.0));
  CHECK_FALSE(l.token_definition.empty());
}

TEST_CASE("stats report document") {
  const auto corpus = fixtures::reference_totals_corpus();
  const std::string text = stats_report_json(corpus, "2011-10");
  CHECK(text == stats_report_json(corpus, "2011-10"));
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["format"] == "smscorpus-stats/1");
  CHECK(doc["version"] == "2011-10");
  CHECK(doc["summary"]["languages"]["english"]["mean_per_contributor"] == 247.6);
  CHECK(doc["contributor_distribution"]["english"]["below_30_percent"] == 54.3);
  CHECK(doc["methods"]["upload"]["english"] == 17140);
  CHECK(doc.contains("breakdowns"));
  CHECK(doc.contains("length"));
}
