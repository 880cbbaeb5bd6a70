#include "smscorpus/store.hpp"

#include <sqlite3.h>

#include <cstdio>
#include <mutex>
#include <set>

#include "smscorpus/anonymize.hpp"
#include "smscorpus/config.hpp"
#include "smscorpus/error.hpp"

namespace smscorpus {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS counters (
  name TEXT PRIMARY KEY,
  value INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS profiles (
  id TEXT PRIMARY KEY,
  age TEXT NOT NULL, gender TEXT NOT NULL, country TEXT NOT NULL,
  native TEXT NOT NULL, input TEXT NOT NULL, daily TEXT NOT NULL,
  years TEXT NOT NULL, brand TEXT NOT NULL, model TEXT NOT NULL,
  smartphone TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS batches (
  id TEXT PRIMARY KEY,
  contributor TEXT NOT NULL,
  method TEXT NOT NULL,
  source TEXT NOT NULL,
  received_at INTEGER NOT NULL,
  status TEXT NOT NULL,
  reason TEXT,
  reward_cents INTEGER,
  reward_currency TEXT,
  attested INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS messages (
  id TEXT PRIMARY KEY,
  batch_id TEXT NOT NULL REFERENCES batches(id),
  ord INTEGER NOT NULL,
  body TEXT NOT NULL,
  language TEXT NOT NULL,
  sender TEXT,
  receiver TEXT,
  sent_at INTEGER,
  method TEXT NOT NULL,
  source TEXT NOT NULL,
  profile_id TEXT REFERENCES profiles(id),
  status TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS messages_batch ON messages(batch_id, ord);
CREATE TABLE IF NOT EXISTS versions (
  id TEXT PRIMARY KEY,
  created_at INTEGER NOT NULL,
  count_en INTEGER NOT NULL,
  count_zh INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS artifacts (
  version_id TEXT NOT NULL REFERENCES versions(id),
  name TEXT NOT NULL,
  digest TEXT NOT NULL,
  bytes BLOB NOT NULL,
  PRIMARY KEY (version_id, name)
);
)sql";

[[noreturn]] void storage_error(sqlite3* db, const std::string& what) {
  throw CorpusError(ErrorCode::storage, what + ": " + (db ? sqlite3_errmsg(db) : "no database"));
}

class Stmt {
 public:
  Stmt(sqlite3* db, std::string_view sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) !=
        SQLITE_OK) {
      storage_error(db, "prepare");
    }
  }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;
  ~Stmt() { sqlite3_finalize(stmt_); }

  Stmt& bind(int i, std::string_view v) {
    check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Stmt& bind(int i, std::int64_t v) {
    check(sqlite3_bind_int64(stmt_, i, v));
    return *this;
  }
  Stmt& bind_null(int i) {
    check(sqlite3_bind_null(stmt_, i));
    return *this;
  }
  Stmt& bind_opt(int i, const std::optional<std::string>& v) {
    return v ? bind(i, std::string_view(*v)) : bind_null(i);
  }
  Stmt& bind_blob(int i, std::string_view v) {
    check(sqlite3_bind_blob(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (rc == SQLITE_CONSTRAINT) {
      throw CorpusError(ErrorCode::duplicate_id, std::string("constraint: ") + sqlite3_errmsg(db_));
    }
    storage_error(db_, "step");
  }
  void run() {
    while (step()) {
    }
  }

  bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
  std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }
  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : "";
  }
  std::string blob(int col) const {
    const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : "";
  }
  std::optional<std::string> opt_text(int col) const {
    if (is_null(col)) return std::nullopt;
    return text(col);
  }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) storage_error(db_, "bind");
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw CorpusError(ErrorCode::storage, std::string("exec: ") + msg);
  }
}

template <typename E>
E column_enum(const Stmt& s, int col) {
  const std::string v = s.text(col);
  const auto e = parse_enum<E>(v);
  if (!e) throw CorpusError(ErrorCode::storage, "corrupt store value '" + v + "'");
  return *e;
}

// RAII transaction: rolls back unless committed.
class Transaction {
 public:
  explicit Transaction(sqlite3* db) : db_(db) { exec(db_, "BEGIN IMMEDIATE"); }
  Transaction(const Transaction&) = delete;
  Transaction& operator=(const Transaction&) = delete;
  ~Transaction() {
    if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    exec(db_, "COMMIT");
    done_ = true;
  }

 private:
  sqlite3* db_;
  bool done_ = false;
};

constexpr const char* kMessageColumns =
    "m.id, m.body, m.language, m.sender, m.receiver, m.sent_at, m.method, m.source, "
    "m.profile_id, m.batch_id, m.status";

Message read_message(const Stmt& s) {
  Message m;
  m.id = s.text(0);
  m.body = s.text(1);
  m.language = column_enum<Language>(s, 2);
  m.sender_token = s.opt_text(3);
  m.receiver_token = s.opt_text(4);
  if (!s.is_null(5)) m.sent_at = Timestamp{s.int64(5)};
  m.collection_method = column_enum<CollectionMethod>(s, 6);
  m.source = column_enum<Source>(s, 7);
  m.profile_id = s.opt_text(8);
  m.batch_id = s.text(9);
  m.status = column_enum<Status>(s, 10);
  return m;
}

constexpr const char* kBatchColumns =
    "id, contributor, method, source, received_at, status, reason, reward_cents, "
    "reward_currency, attested";

UserProfile read_profile(const Stmt& s) {
  UserProfile p;
  p.id = s.text(0);
  for (std::size_t i = 0; i < kProfileFields.size(); ++i) {
    set_profile_field(p, kProfileFields[i], s.text(static_cast<int>(i) + 1));
  }
  return p;
}

void check_message_invariants(const Message& m) {
  if (has_residual_pii(m.body)) {
    throw CorpusError(ErrorCode::invariant_violation,
                      "message " + m.id + " body still contains a scrubbable span");
  }
  for (const auto* token : {&m.sender_token, &m.receiver_token}) {
    if (*token && looks_like_phone_number(**token)) {
      throw CorpusError(ErrorCode::invariant_violation,
                        "message " + m.id + " carries a raw phone number as token");
    }
  }
}

}  // namespace

MessageFilter MessageFilter::parse(const std::map<std::string, std::string>& params) {
  MessageFilter f;
  auto need = [](const auto& parsed, const std::string& key, const std::string& value) {
    if (!parsed) {
      throw CorpusError(ErrorCode::invalid_argument,
                        "invalid value '" + value + "' for filter " + key);
    }
    return *parsed;
  };
  for (const auto& [key, value] : params) {
    if (key == "language") {
      f.language = need(parse_enum<Language>(value), key, value);
    } else if (key == "source") {
      f.source = need(parse_enum<Source>(value), key, value);
    } else if (key == "method") {
      f.method = need(parse_enum<CollectionMethod>(value), key, value);
    } else if (key == "status") {
      f.status = need(parse_enum<Status>(value), key, value);
    } else if (key == "profile_id") {
      if (value.empty()) throw CorpusError(ErrorCode::invalid_argument, "empty profile_id filter");
      f.profile_id = value;
    } else {
      throw CorpusError(ErrorCode::invalid_argument, "unknown filter " + key);
    }
  }
  return f;
}

struct Store::Impl {
  sqlite3* db = nullptr;

  ~Impl() {
    if (db) sqlite3_close(db);
  }

  void put_profile(const UserProfile& p) {
    Stmt s(db,
           "INSERT INTO profiles (id, age, gender, country, native, input, daily, years, brand, "
           "model, smartphone) VALUES (?,?,?,?,?,?,?,?,?,?,?) "
           "ON CONFLICT(id) DO UPDATE SET age=excluded.age, gender=excluded.gender, "
           "country=excluded.country, native=excluded.native, input=excluded.input, "
           "daily=excluded.daily, years=excluded.years, brand=excluded.brand, "
           "model=excluded.model, smartphone=excluded.smartphone");
    s.bind(1, p.id);
    for (std::size_t i = 0; i < kProfileFields.size(); ++i) {
      s.bind(static_cast<int>(i) + 2, *profile_field(p, kProfileFields[i]));
    }
    s.run();
  }

  bool exists(const char* sql, std::string_view id) const {
    Stmt s(db, sql);
    s.bind(1, id);
    return s.step();
  }

  std::vector<std::string> message_ids(std::string_view batch_id) const {
    Stmt s(db, "SELECT id FROM messages WHERE batch_id = ? ORDER BY ord");
    s.bind(1, batch_id);
    std::vector<std::string> out;
    while (s.step()) out.push_back(s.text(0));
    return out;
  }

  SubmissionBatch read_batch(const Stmt& s) const {
    SubmissionBatch b;
    b.id = s.text(0);
    b.contributor_ref = s.text(1);
    b.collection_method = column_enum<CollectionMethod>(s, 2);
    b.source = column_enum<Source>(s, 3);
    b.received_at = Timestamp{s.int64(4)};
    b.status = column_enum<Status>(s, 5);
    b.rejection_reason = s.opt_text(6);
    if (!s.is_null(7)) b.reward = Money{s.int64(7), column_enum<Currency>(s, 8)};
    b.attested_personal = s.int64(9) != 0;
    b.message_ids = message_ids(b.id);
    return b;
  }

  std::optional<SubmissionBatch> batch(std::string_view id) const {
    Stmt s(db, std::string("SELECT ") + kBatchColumns + " FROM batches WHERE id = ?");
    s.bind(1, id);
    if (!s.step()) return std::nullopt;
    return read_batch(s);
  }

  std::vector<CorpusVersion> versions() const {
    std::vector<CorpusVersion> out;
    Stmt s(db, "SELECT id, created_at, count_en, count_zh FROM versions ORDER BY id");
    while (s.step()) {
      CorpusVersion v;
      v.version_id = s.text(0);
      v.created_at = Timestamp{s.int64(1)};
      v.message_count_en = s.int64(2);
      v.message_count_zh = s.int64(3);
      out.push_back(std::move(v));
    }
    for (auto& v : out) {
      Stmt a(db,
             "SELECT name, digest FROM artifacts WHERE version_id = ? AND name NOT LIKE "
             "'MANIFEST-%' ORDER BY name");
      a.bind(1, v.version_id);
      while (a.step()) v.artifact_checksums[a.text(0)] = a.text(1);
    }
    return out;
  }
};

Store::Store(std::unique_ptr<Impl> impl, std::filesystem::path root)
    : impl_(std::move(impl)),
      root_(std::move(root)),
      mutex_(std::make_unique<std::shared_mutex>()) {}

Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;
Store::~Store() = default;

namespace {

std::unique_ptr<sqlite3, int (*)(sqlite3*)> open_db(const std::string& path, bool file_backed) {
  sqlite3* raw = nullptr;
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  const int rc = sqlite3_open_v2(path.c_str(), &raw, flags, nullptr);
  std::unique_ptr<sqlite3, int (*)(sqlite3*)> db(raw, sqlite3_close);
  if (rc != SQLITE_OK) storage_error(raw, "open " + path);
  sqlite3_busy_timeout(raw, 10000);
  exec(raw, "PRAGMA foreign_keys = ON");
  if (file_backed) {
    exec(raw, "PRAGMA journal_mode = WAL");
    exec(raw, "PRAGMA synchronous = NORMAL");
  }
  exec(raw, kSchema);
  return db;
}

}  // namespace

Store Store::open(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "releases", ec);
  if (ec) throw CorpusError(ErrorCode::io, "cannot create store " + dir.string() + ": " + ec.message());
  auto db = open_db((dir / "corpus.db").string(), true);
  auto impl = std::make_unique<Impl>();
  impl->db = db.release();
  return Store(std::move(impl), dir);
}

Store Store::in_memory() {
  auto db = open_db(":memory:", false);
  auto impl = std::make_unique<Impl>();
  impl->db = db.release();
  return Store(std::move(impl), {});
}

std::string Store::allocate_batch_id() {
  std::unique_lock lock(*mutex_);
  Transaction tx(impl_->db);
  Stmt(impl_->db,
       "INSERT INTO counters (name, value) VALUES ('batch', 1) "
       "ON CONFLICT(name) DO UPDATE SET value = value + 1")
      .run();
  Stmt s(impl_->db, "SELECT value FROM counters WHERE name = 'batch'");
  s.step();
  const std::int64_t n = s.int64(0);
  tx.commit();
  char buf[32];
  std::snprintf(buf, sizeof buf, "B%06lld", static_cast<long long>(n));
  return buf;
}

std::vector<std::string> Store::put_batch(SubmissionBatch batch, std::vector<Message> messages,
                                          const std::optional<UserProfile>& profile) {
  if (batch.id.empty()) throw CorpusError(ErrorCode::invalid_argument, "batch id is empty");
  if (batch.reward.has_value() != (batch.status == Status::approved)) {
    throw CorpusError(ErrorCode::invariant_violation,
                      "batch " + batch.id + ": reward must be present exactly when approved");
  }
  std::set<std::string> seen;
  for (auto& m : messages) {
    if (m.id.empty()) throw CorpusError(ErrorCode::invalid_argument, "message id is empty");
    if (m.batch_id != batch.id) {
      throw CorpusError(ErrorCode::referential,
                        "message " + m.id + " references batch " + m.batch_id);
    }
    if (!seen.insert(m.id).second) {
      throw CorpusError(ErrorCode::duplicate_id, "message id " + m.id + " repeated in batch");
    }
    m.status = batch.status;
    check_message_invariants(m);
  }

  std::unique_lock lock(*mutex_);
  sqlite3* db = impl_->db;
  Transaction tx(db);
  if (impl_->exists("SELECT 1 FROM batches WHERE id = ?", batch.id)) {
    throw CorpusError(ErrorCode::duplicate_id, "batch " + batch.id + " already stored");
  }
  if (profile) impl_->put_profile(*profile);
  for (const auto& m : messages) {
    if (m.profile_id && !(profile && profile->id == *m.profile_id) &&
        !impl_->exists("SELECT 1 FROM profiles WHERE id = ?", *m.profile_id)) {
      throw CorpusError(ErrorCode::referential,
                        "message " + m.id + " references unknown profile " + *m.profile_id);
    }
    if (impl_->exists("SELECT 1 FROM messages WHERE id = ?", m.id)) {
      throw CorpusError(ErrorCode::duplicate_id, "message " + m.id + " already stored");
    }
  }

  Stmt b(db,
         "INSERT INTO batches (id, contributor, method, source, received_at, status, reason, "
         "reward_cents, reward_currency, attested) VALUES (?,?,?,?,?,?,?,?,?,?)");
  b.bind(1, batch.id)
      .bind(2, batch.contributor_ref)
      .bind(3, to_string(batch.collection_method))
      .bind(4, to_string(batch.source))
      .bind(5, batch.received_at.seconds)
      .bind(6, to_string(batch.status))
      .bind_opt(7, batch.rejection_reason);
  if (batch.reward) {
    b.bind(8, batch.reward->cents).bind(9, to_string(batch.reward->currency));
  } else {
    b.bind_null(8).bind_null(9);
  }
  b.bind(10, std::int64_t{batch.attested_personal ? 1 : 0});
  b.run();

  std::vector<std::string> ids;
  ids.reserve(messages.size());
  std::int64_t ord = 0;
  for (const auto& m : messages) {
    Stmt s(db,
           "INSERT INTO messages (id, batch_id, ord, body, language, sender, receiver, sent_at, "
           "method, source, profile_id, status) VALUES (?,?,?,?,?,?,?,?,?,?,?,?)");
    s.bind(1, m.id)
        .bind(2, m.batch_id)
        .bind(3, ord++)
        .bind(4, m.body)
        .bind(5, to_string(m.language))
        .bind_opt(6, m.sender_token)
        .bind_opt(7, m.receiver_token);
    if (m.sent_at) {
      s.bind(8, m.sent_at->seconds);
    } else {
      s.bind_null(8);
    }
    s.bind(9, to_string(m.collection_method))
        .bind(10, to_string(m.source))
        .bind_opt(11, m.profile_id)
        .bind(12, to_string(m.status));
    s.run();
    ids.push_back(m.id);
  }
  tx.commit();
  return ids;
}

MessagePage Store::query_messages(const MessageFilter& filter, Page page) const {
  if (page.limit > kMaxPageLimit) {
    throw CorpusError(ErrorCode::invalid_argument,
                      "limit " + std::to_string(page.limit) + " exceeds " +
                          std::to_string(kMaxPageLimit));
  }
  std::string where = " WHERE 1=1";
  std::vector<std::string> args;
  auto add = [&](const char* clause, std::string value) {
    where += clause;
    args.push_back(std::move(value));
  };
  if (filter.language) add(" AND m.language = ?", std::string(to_string(*filter.language)));
  if (filter.source) add(" AND m.source = ?", std::string(to_string(*filter.source)));
  if (filter.method) add(" AND m.method = ?", std::string(to_string(*filter.method)));
  if (filter.status) add(" AND m.status = ?", std::string(to_string(*filter.status)));
  if (filter.profile_id) add(" AND m.profile_id = ?", *filter.profile_id);

  std::shared_lock lock(*mutex_);
  MessagePage out;
  {
    Stmt c(impl_->db, "SELECT COUNT(*) FROM messages m" + where);
    for (std::size_t i = 0; i < args.size(); ++i) c.bind(static_cast<int>(i) + 1, args[i]);
    c.step();
    out.total = static_cast<std::size_t>(c.int64(0));
  }
  Stmt s(impl_->db, std::string("SELECT ") + kMessageColumns +
                        " FROM messages m JOIN batches b ON b.id = m.batch_id" + where +
                        " ORDER BY b.received_at, m.id LIMIT ? OFFSET ?");
  int i = 1;
  for (const auto& a : args) s.bind(i++, a);
  s.bind(i++, static_cast<std::int64_t>(page.limit));
  s.bind(i, static_cast<std::int64_t>(page.offset));
  while (s.step()) out.messages.push_back(read_message(s));
  return out;
}

std::optional<SubmissionBatch> Store::get_batch(std::string_view id) const {
  std::shared_lock lock(*mutex_);
  return impl_->batch(id);
}

std::vector<SubmissionBatch> Store::list_batches(std::optional<Status> status) const {
  std::shared_lock lock(*mutex_);
  std::string sql = std::string("SELECT ") + kBatchColumns + " FROM batches";
  if (status) sql += " WHERE status = ?";
  sql += " ORDER BY received_at, id";
  Stmt s(impl_->db, sql);
  if (status) s.bind(1, to_string(*status));
  std::vector<SubmissionBatch> out;
  while (s.step()) out.push_back(impl_->read_batch(s));
  return out;
}

std::vector<Message> Store::batch_messages(std::string_view batch_id) const {
  std::shared_lock lock(*mutex_);
  Stmt s(impl_->db, std::string("SELECT ") + kMessageColumns +
                        " FROM messages m WHERE m.batch_id = ? ORDER BY m.ord");
  s.bind(1, batch_id);
  std::vector<Message> out;
  while (s.step()) out.push_back(read_message(s));
  return out;
}

std::optional<UserProfile> Store::get_profile(std::string_view id) const {
  std::shared_lock lock(*mutex_);
  Stmt s(impl_->db,
         "SELECT id, age, gender, country, native, input, daily, years, brand, model, "
         "smartphone FROM profiles WHERE id = ?");
  s.bind(1, id);
  if (!s.step()) return std::nullopt;
  return read_profile(s);
}

SubmissionBatch Store::finalize_batch(std::string_view batch_id, Status decision,
                                      std::optional<std::string> reason,
                                      std::optional<Money> reward) {
  if (decision == Status::pending) {
    throw CorpusError(ErrorCode::invalid_argument, "decision must be approved or rejected");
  }
  if (reward.has_value() != (decision == Status::approved)) {
    throw CorpusError(ErrorCode::invariant_violation,
                      "reward must be present exactly when approving");
  }
  std::unique_lock lock(*mutex_);
  sqlite3* db = impl_->db;
  Transaction tx(db);
  Stmt u(db,
         "UPDATE batches SET status = ?, reason = ?, reward_cents = ?, reward_currency = ? "
         "WHERE id = ? AND status = 'pending'");
  u.bind(1, to_string(decision)).bind_opt(2, reason);
  if (reward) {
    u.bind(3, reward->cents).bind(4, to_string(reward->currency));
  } else {
    u.bind_null(3).bind_null(4);
  }
  u.bind(5, batch_id);
  u.run();
  if (sqlite3_changes(db) == 0) {
    const auto existing = impl_->batch(batch_id);
    if (!existing) throw CorpusError(ErrorCode::not_found, "batch not found: " + std::string(batch_id));
    throw CorpusError(ErrorCode::conflict, "batch " + std::string(batch_id) + " is already " +
                                               std::string(to_string(existing->status)));
  }
  Stmt m(db, "UPDATE messages SET status = ? WHERE batch_id = ?");
  m.bind(1, to_string(decision)).bind(2, batch_id);
  m.run();
  auto updated = impl_->batch(batch_id);
  tx.commit();
  return *updated;
}

CorpusSnapshot Store::snapshot(bool approved_only) const {
  std::shared_lock lock(*mutex_);
  sqlite3* db = impl_->db;
  CorpusSnapshot snap;
  {
    const std::string cond = approved_only ? " WHERE m.status = 'approved'" : "";
    Stmt s(db, std::string("SELECT ") + kMessageColumns + " FROM messages m" + cond +
                   " ORDER BY m.id");
    while (s.step()) snap.messages.push_back(read_message(s));

    Stmt b(db, std::string("SELECT ") + kBatchColumns + " FROM batches" +
                   (approved_only ? " WHERE status = 'approved'" : "") + " ORDER BY id");
    while (b.step()) snap.batches.push_back(impl_->read_batch(b));

    Stmt p(db, std::string("SELECT id, age, gender, country, native, input, daily, years, "
                           "brand, model, smartphone FROM profiles") +
                   (approved_only ? " WHERE id IN (SELECT profile_id FROM messages m" + cond +
                                        " AND m.profile_id IS NOT NULL)"
                                  : std::string()) +
                   " ORDER BY id");
    while (p.step()) snap.profiles.push_back(read_profile(p));
  }
  return snap;
}

void Store::put_version(const CorpusVersion& version,
                        const std::vector<StoredArtifact>& artifacts) {
  std::unique_lock lock(*mutex_);
  sqlite3* db = impl_->db;
  Transaction tx(db);
  const auto existing = impl_->versions();
  if (!existing.empty()) {
    const CorpusVersion& last = existing.back();
    if (version.version_id <= last.version_id) {
      throw CorpusError(ErrorCode::non_monotone_version,
                        "version " + version.version_id + " is not after " + last.version_id);
    }
    if (version.message_count_en < last.message_count_en ||
        version.message_count_zh < last.message_count_zh) {
      throw CorpusError(ErrorCode::shrinking_corpus,
                        "version " + version.version_id + " has fewer messages than " +
                            last.version_id);
    }
  }
  Stmt v(db, "INSERT INTO versions (id, created_at, count_en, count_zh) VALUES (?,?,?,?)");
  v.bind(1, version.version_id)
      .bind(2, version.created_at.seconds)
      .bind(3, version.message_count_en)
      .bind(4, version.message_count_zh);
  v.run();
  for (const auto& a : artifacts) {
    Stmt s(db, "INSERT INTO artifacts (version_id, name, digest, bytes) VALUES (?,?,?,?)");
    s.bind(1, version.version_id).bind(2, a.name).bind(3, a.digest).bind_blob(4, a.bytes);
    s.run();
  }
  if (!root_.empty()) {
    const auto dir = root_ / "releases" / version.version_id;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw CorpusError(ErrorCode::io, "cannot create " + dir.string());
    for (const auto& a : artifacts) write_file(dir / a.name, a.bytes);
  }
  tx.commit();
}

std::vector<CorpusVersion> Store::versions() const {
  std::shared_lock lock(*mutex_);
  return impl_->versions();
}

std::optional<CorpusVersion> Store::latest_version() const {
  auto all = versions();
  if (all.empty()) return std::nullopt;
  return std::move(all.back());
}

std::optional<StoredArtifact> Store::artifact(std::string_view version_id,
                                              std::string_view name) const {
  std::shared_lock lock(*mutex_);
  Stmt s(impl_->db, "SELECT name, bytes, digest FROM artifacts WHERE version_id = ? AND name = ?");
  s.bind(1, version_id).bind(2, name);
  if (!s.step()) return std::nullopt;
  return StoredArtifact{s.text(0), s.blob(1), s.text(2)};
}

}  // namespace smscorpus
