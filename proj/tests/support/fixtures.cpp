#include "fixtures.hpp"

#include <cstdio>

#include "oracles.hpp"
#include "smscorpus/anonymize.hpp"
#include "smscorpus/config.hpp"
#include "smscorpus/crypto.hpp"
#include "smscorpus/utf8.hpp"
#include "smscorpus/validate.hpp"

#ifndef SMSCORPUS_TEST_FIXTURES
#define SMSCORPUS_TEST_FIXTURES "tests/fixtures"
#endif
#ifndef SMSCORPUS_TEST_DATA
#define SMSCORPUS_TEST_DATA "data"
#endif

namespace fs = std::filesystem;
using namespace smscorpus;

namespace fixtures {

fs::path path(std::string_view relative) { return fs::path(SMSCORPUS_TEST_FIXTURES) / relative; }

std::string read(std::string_view relative) { return read_file(path(relative)); }

fs::path data_dir() { return SMSCORPUS_TEST_DATA; }

std::string secrets_text() {
  return "pseudonym_key=000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f\n"
         "upload_secret=5365637265742d75706c6f61642d6b6579\n"
         "admin_token=test-admin-token\n";
}

Secrets secrets() { return Secrets::parse(secrets_text()); }

Toolkit toolkit() {
  Toolkit t;
  t.secrets = secrets();
  t.policy = ModerationPolicy::load(data_dir() / "policy.txt");
  t.blocklist = load_blocklist(data_dir() / "blocklist.txt");
  t.schemes = SchemeRegistry::load_directory(data_dir() / "schemes");
  t.emoticons = EmoticonTable::load(data_dir() / "emoticons.txt");
  return t;
}

TempDir::TempDir() {
  const std::string tag = crypto::to_hex(crypto::random_bytes(6));
  path_ = fs::temp_directory_path() / ("smscorpus-test-" + tag);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string english_body(std::size_t i) {
  static const char* const words[] = {"see", "you", "later", "ok", "lah", "dinner", "where",
                                      "call", "me", "when", "free", "going", "home", "now",
                                      "haha", "sure", "meet", "tmr", "at", "mall"};
  std::string out = "msg";
  std::size_t x = i;
  do {
    out.push_back(static_cast<char>('a' + x % 26));
    x /= 26;
  } while (x);
  for (std::size_t k = 0; k < 4; ++k) {
    out.push_back(' ');
    out += words[(i * 7 + k * 3) % 20];
  }
  return out;
}

std::string chinese_body(std::size_t i) {
  std::string out = "我们";
  std::size_t x = i;
  do {
    utf8::append(out, static_cast<char32_t>(0x4E00 + x % 2000));
    x /= 2000;
  } while (x);
  out += "明天见";
  return out;
}

std::string CorpusBuilder::add_batch(std::size_t count, Spec spec) {
  char id[16];
  std::snprintf(id, sizeof id, "B%06zu", next_batch_++);
  SubmissionBatch b;
  b.id = id;
  b.contributor_ref = spec.contributor.empty() ? "C-" + b.id : spec.contributor;
  b.collection_method = spec.method;
  b.source = spec.source;
  b.received_at = Timestamp{1317427200 + static_cast<std::int64_t>(next_batch_) * 60};
  b.status = spec.status;
  if (spec.status == Status::approved) b.reward = Money{0, Currency::USD};
  if (spec.status == Status::rejected) b.rejection_reason = "rejected";
  std::optional<std::string> profile_id;
  if (spec.profile) {
    UserProfile p = *spec.profile;
    p.id = "U" + b.id.substr(1);
    profile_id = p.id;
    snapshot_.profiles.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < count; ++i) {
    Message m;
    char mid[32];
    std::snprintf(mid, sizeof mid, "%s-%04zu", b.id.c_str(), i + 1);
    m.id = mid;
    m.language = spec.language;
    m.body = spec.language == Language::chinese ? chinese_body(next_body_) : english_body(next_body_);
    ++next_body_;
    m.collection_method = spec.method;
    m.source = spec.source;
    m.profile_id = profile_id;
    m.batch_id = b.id;
    m.status = spec.status;
    b.message_ids.push_back(m.id);
    snapshot_.messages.push_back(std::move(m));
  }
  snapshot_.batches.push_back(b);
  return b.id;
}

void CorpusBuilder::add_group(std::size_t total, std::size_t contributors, const Spec& spec) {
  for (std::size_t k = 0; k < contributors; ++k) {
    const std::size_t share = total / contributors + (k < total % contributors ? 1 : 0);
    add_batch(share, spec);
  }
}

CorpusSnapshot reference_totals_corpus() {
  auto profile = [](Gender g, AgeBucket a) {
    UserProfile p;
    p.gender = g;
    p.age = a;
    return p;
  };
  using CB = CorpusBuilder;
  CorpusBuilder b;
  const auto en = Language::english;
  const auto zh = Language::chinese;
  const auto tr = CollectionMethod::transcription;
  const auto ex = CollectionMethod::export_archive;
  const auto up = CollectionMethod::upload;

  // 63 light contributors with 10 messages each, no gender answer.
  const auto young = profile(Gender::unknown, AgeBucket::age_16_20);
  b.add_group(480, 48, CB::Spec{en, tr, Source::mturk, Status::approved, young, {}});
  b.add_group(150, 15, CB::Spec{en, ex, Source::local, Status::approved, young, {}});
  // 53 heavy contributors.
  b.add_group(4625, 8, CB::Spec{en, ex, Source::local, Status::approved,
                                profile(Gender::female, AgeBucket::age_21_25), {}});
  b.add_group(3283, 8, CB::Spec{en, ex, Source::local, Status::approved,
                                profile(Gender::male, AgeBucket::age_26_30), {}});
  b.add_group(3046, 7, CB::Spec{en, ex, Source::local, Status::approved,
                                profile(Gender::unknown, AgeBucket::age_26_30), {}});
  b.add_group(11719, 20, CB::Spec{en, up, Source::community, Status::approved,
                                  profile(Gender::male, AgeBucket::age_21_25), {}});
  b.add_group(5421, 10, CB::Spec{en, up, Source::community, Status::approved,
                                 profile(Gender::male, AgeBucket::age_31_35), {}});

  b.add_group(15753, 300, CB::Spec{zh, tr, Source::zhubajie, Status::approved, std::nullopt, {}});
  b.add_group(12344, 200, CB::Spec{zh, ex, Source::zhubajie, Status::approved, std::nullopt, {}});
  b.add_group(1003, 15, CB::Spec{zh, up, Source::community, Status::approved, std::nullopt, {}});
  return b.snapshot();
}

CorpusSnapshot random_corpus(std::mt19937_64& rng, std::size_t n) {
  CorpusSnapshot s;
  const auto key = PseudonymKey::from_hex(
      "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
  std::size_t made = 0;
  std::size_t batch_no = 0;
  while (made < n) {
    ++batch_no;
    const std::size_t size = std::min<std::size_t>(n - made, 1 + rng() % 40);
    SubmissionBatch b;
    char id[16];
    std::snprintf(id, sizeof id, "B%06zu", batch_no);
    b.id = id;
    b.contributor_ref = "C" + std::to_string(rng() % 50);
    b.collection_method = static_cast<CollectionMethod>(rng() % 3);
    b.source = static_cast<Source>(rng() % 5);
    b.received_at = Timestamp{1317427200 + static_cast<std::int64_t>(batch_no) * 3600};
    b.status = Status::approved;
    b.reward = Money{0, Currency::USD};
    std::optional<std::string> profile_id;
    if (rng() % 4 != 0) {
      UserProfile p;
      p.id = "U" + b.id.substr(1);
      p.age = static_cast<AgeBucket>(rng() % 10);
      p.gender = static_cast<Gender>(rng() % 3);
      p.country = rng() % 2 ? "Singapore" : "unknown";
      p.native_speaker = static_cast<TriState>(rng() % 3);
      p.input_method = rng() % 2 ? "T9 & \"multi-tap\"" : "unknown";
      p.daily_sms = static_cast<DailySmsBucket>(rng() % 5);
      p.years_sms = static_cast<YearsSmsBucket>(rng() % 6);
      p.phone_brand = rng() % 2 ? "Nokia" : "unknown";
      p.phone_model = rng() % 2 ? "<E71>" : "unknown";
      p.smartphone = static_cast<TriState>(rng() % 3);
      profile_id = p.id;
      s.profiles.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < size; ++i) {
      Message m;
      char mid[32];
      std::snprintf(mid, sizeof mid, "%s-%04zu", b.id.c_str(), i + 1);
      m.id = mid;
      m.body = scrub_body(normalize_emoticons(oracle::fuzz_text(rng)));
      m.language = detect_language(m.body);
      if (rng() % 2) m.sender_token = pseudonymize_number(std::to_string(90000000 + rng() % 999999), key);
      if (rng() % 2) m.receiver_token = pseudonymize_number(std::to_string(80000000 + rng() % 999999), key);
      if (rng() % 2) m.sent_at = Timestamp{1300000000 + static_cast<std::int64_t>(rng() % 30000000)};
      m.collection_method = b.collection_method;
      m.source = b.source;
      m.profile_id = profile_id;
      m.batch_id = b.id;
      m.status = Status::approved;
      b.message_ids.push_back(m.id);
      s.messages.push_back(std::move(m));
    }
    made += size;
    s.batches.push_back(std::move(b));
  }
  return s;
}

}  // namespace fixtures
