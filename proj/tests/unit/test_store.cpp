#include <doctest.h>

#include <thread>

#include "fixtures.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/store.hpp"

using namespace smscorpus;

namespace {

struct Pending {
  SubmissionBatch batch;
  std::vector<Message> messages;
  std::optional<UserProfile> profile;
};

Pending make(Store& store, std::size_t n, Language lang = Language::english, bool profile = true) {
  Pending p;
  p.batch.id = store.allocate_batch_id();
  p.batch.contributor_ref = "C-" + p.batch.id;
  p.batch.received_at = Timestamp{1317427200};
  if (profile) {
    p.profile = UserProfile{};
    p.profile->id = "U" + p.batch.id.substr(1);
    p.profile->gender = Gender::female;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Message m;
    m.id = p.batch.id + "-" + std::to_string(1000 + i);
    m.body = lang == Language::chinese ? fixtures::chinese_body(i) : fixtures::english_body(i);
    m.language = lang;
    m.batch_id = p.batch.id;
    if (profile) m.profile_id = p.profile->id;
    p.messages.push_back(m);
  }
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const CorpusError& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("put_batch commits messages and profile") {
  Store store = Store::in_memory();
  auto p = make(store, 3);
  const auto ids = store.put_batch(p.batch, p.messages, p.profile);
  CHECK(ids.size() == 3);
  const auto b = store.get_batch(p.batch.id);
  REQUIRE(b);
  CHECK(b->status == Status::pending);
  CHECK(b->message_ids == ids);
  CHECK(store.get_profile(p.profile->id)->gender == Gender::female);
  const auto stored = store.batch_messages(p.batch.id);
  REQUIRE(stored.size() == 3);
  CHECK(stored[0].body == p.messages[0].body);
  CHECK(stored[0].status == Status::pending);

  CHECK(code_of([&] { store.put_batch(p.batch, p.messages, p.profile); }) == ErrorCode::duplicate_id);
}

TEST_CASE("put_batch rejects bad references and residual text") {
  Store store = Store::in_memory();
  auto p = make(store, 2);
  p.messages[1].profile_id = "U424242";
  CHECK(code_of([&] { store.put_batch(p.batch, p.messages, p.profile); }) == ErrorCode::referential);
  CHECK_FALSE(store.get_batch(p.batch.id));

  auto q = make(store, 2);
  q.messages[0].body = "call 91234567";
  CHECK(code_of([&] { store.put_batch(q.batch, q.messages, q.profile); }) ==
        ErrorCode::invariant_violation);

  auto r = make(store, 1);
  r.messages[0].sender_token = "+6591234567";
  CHECK(code_of([&] { store.put_batch(r.batch, r.messages, r.profile); }) ==
        ErrorCode::invariant_violation);

  auto s = make(store, 1);
  s.messages[0].batch_id = "B000000";
  CHECK(code_of([&] { store.put_batch(s.batch, s.messages, s.profile); }) == ErrorCode::referential);
}

TEST_CASE("query filters and pages") {
  Store store = Store::in_memory();
  CHECK(store.query_messages({}, {}).total == 0);
  for (auto lang : {Language::english, Language::chinese}) {
    auto p = make(store, lang == Language::english ? 5 : 3, lang);
    store.put_batch(p.batch, p.messages, p.profile);
    store.finalize_batch(p.batch.id, Status::approved, std::nullopt, Money{0, Currency::USD});
  }
  MessageFilter en;
  en.language = Language::english;
  CHECK(store.query_messages(en, {}).total == 5);
  CHECK(store.query_messages(MessageFilter::parse({{"language", "chinese"}}), {}).total == 3);
  CHECK_THROWS_AS(MessageFilter::parse({{"colour", "red"}}), CorpusError);
  CHECK_THROWS_AS(MessageFilter::parse({{"language", "elvish"}}), CorpusError);

  const auto full = store.query_messages(en, {0, 100});
  std::vector<Message> paged;
  std::size_t pages = 0;
  for (std::size_t off = 0; off < full.total; off += 2) {
    const auto page = store.query_messages(en, {off, 2});
    CHECK(page.total == 5);
    paged.insert(paged.end(), page.messages.begin(), page.messages.end());
    ++pages;
  }
  CHECK(pages == 3);
  CHECK(paged == full.messages);
  CHECK_THROWS_AS(store.query_messages(en, {0, 5000}), CorpusError);
}

TEST_CASE("finalize is a one-way transition") {
  Store store = Store::in_memory();
  auto p = make(store, 2);
  store.put_batch(p.batch, p.messages, p.profile);
  const auto done = store.finalize_batch(p.batch.id, Status::rejected, "spam", std::nullopt);
  CHECK(done.status == Status::rejected);
  CHECK(store.batch_messages(p.batch.id)[0].status == Status::rejected);
  CHECK(code_of([&] {
          store.finalize_batch(p.batch.id, Status::approved, std::nullopt, Money{0, Currency::USD});
        }) == ErrorCode::conflict);
  CHECK(code_of([&] { store.finalize_batch("B777777", Status::rejected, "x", std::nullopt); }) ==
        ErrorCode::not_found);
  CHECK(store.list_batches(Status::rejected).size() == 1);
  CHECK(store.list_batches(Status::pending).empty());
}

TEST_CASE("snapshot of the approved corpus") {
  Store store = Store::in_memory();
  auto a = make(store, 2);
  auto b = make(store, 3);
  store.put_batch(a.batch, a.messages, a.profile);
  store.put_batch(b.batch, b.messages, b.profile);
  store.finalize_batch(a.batch.id, Status::approved, std::nullopt, Money{450, Currency::USD});
  const auto approved = store.snapshot(true);
  CHECK(approved.messages.size() == 2);
  CHECK(approved.batches.size() == 1);
  CHECK(approved.profiles.size() == 1);
  CHECK(approved.batches[0].reward == Money{450, Currency::USD});
  CHECK(store.snapshot(false).messages.size() == 5);
}

TEST_CASE("versions are monotone and non-shrinking") {
  Store store = Store::in_memory();
  CorpusVersion v1{"2011-02", Timestamp{1}, 5, 3, {}};
  store.put_version(v1, {{"a.txt", "alpha", "digest-a"}});
  CHECK(store.artifact("2011-02", "a.txt")->bytes == "alpha");
  CHECK(store.versions().size() == 1);
  CHECK(store.versions()[0].artifact_checksums.at("a.txt") == "digest-a");
  CHECK(code_of([&] { store.put_version(v1, {}); }) == ErrorCode::non_monotone_version);
  CHECK(code_of([&] { store.put_version({"2011-01", Timestamp{2}, 9, 9, {}}, {}); }) ==
        ErrorCode::non_monotone_version);
  CHECK(code_of([&] { store.put_version({"2011-03", Timestamp{2}, 4, 3, {}}, {}); }) ==
        ErrorCode::shrinking_corpus);
  store.put_version({"2011-03", Timestamp{2}, 5, 4, {}}, {});
  CHECK(store.latest_version()->version_id == "2011-03");
  CHECK_FALSE(store.artifact("2011-03", "a.txt"));
}

TEST_CASE("file-backed store persists and serializes writers") {
  fixtures::TempDir dir;
  {
    Store store = Store::open(dir.path());
    auto p = make(store, 2);
    store.put_batch(p.batch, p.messages, p.profile);
  }
  Store store = Store::open(dir.path());
  CHECK(store.list_batches().size() == 1);
  CHECK(store.allocate_batch_id() == "B000002");

  std::vector<std::thread> writers;
  std::atomic<int> failures{0};
  for (int t = 0; t < 4; ++t) {
    writers.emplace_back([&] {
      for (int i = 0; i < 10; ++i) {
        try {
          auto p = make(store, 2);
          store.put_batch(p.batch, p.messages, p.profile);
          store.snapshot(false);
        } catch (...) {
          ++failures;
        }
      }
    });
  }
  for (auto& w : writers) w.join();
  CHECK(failures == 0);
  CHECK(store.list_batches().size() == 41);
}
