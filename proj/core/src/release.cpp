#include "smscorpus/release.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <set>

#include <json.hpp>

#include "smscorpus/anonymize.hpp"
#include "smscorpus/crypto.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/stats.hpp"
#include "smscorpus/xml.hpp"

namespace smscorpus {

namespace {

constexpr std::array<std::string_view, 4> kMessageRequired = {"id", "language", "method",
                                                              "source"};
constexpr std::array<std::string_view, 4> kMessageOptional = {"profile", "time", "sender",
                                                              "receiver"};

std::string release_date(std::string_view version_id) { return std::string(version_id) + "-01"; }

void attr(std::string& out, std::string_view name, std::string_view value) {
  out += ' ';
  out += name;
  out += "=\"";
  out += xml::escape_attribute(value);
  out += '"';
}

std::string sql_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

std::string sql_opt(const std::optional<std::string>& s) { return s ? sql_quote(*s) : "NULL"; }

[[noreturn]] void schema_error(const std::string& what, const xml::Event& at) {
  throw ParseError(ErrorCode::schema_violation,
                   "release xml: " + what + " at line " + std::to_string(at.line) + ", column " +
                       std::to_string(at.column),
                   at.line, at.column);
}

template <typename E>
E require_enum(const xml::Event& e, std::string_view name) {
  const std::string* v = e.attribute(name);
  const auto parsed = v ? parse_enum<E>(*v) : std::nullopt;
  if (!parsed) {
    schema_error("<" + e.name + "> has " + (v ? "an invalid" : "no") + " " + std::string(name) +
                     " attribute",
                 e);
  }
  return *parsed;
}

}  // namespace

std::string_view to_string(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::xml_dump: return "xml_dump";
    case ArtifactKind::sql_dump: return "sql_dump";
    case ArtifactKind::stats_report: return "stats_report";
  }
  return "?";
}

std::size_t ReleaseContent::count(Language language) const {
  return static_cast<std::size_t>(
      std::count_if(messages.begin(), messages.end(),
                    [language](const Message& m) { return m.language == language; }));
}

const ReleaseArtifact* ReleaseBundle::find(ArtifactKind kind) const {
  for (const auto& a : artifacts) {
    if (a.kind == kind) return &a;
  }
  return nullptr;
}

bool valid_version_id(std::string_view v) {
  if (v.size() != 7 || v[4] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6}) {
    if (v[i] < '0' || v[i] > '9') return false;
  }
  const int month = (v[5] - '0') * 10 + (v[6] - '0');
  return month >= 1 && month <= 12;
}

std::string xml_dump_name(std::string_view v) { return "corpus-" + std::string(v) + ".xml"; }
std::string sql_dump_name(std::string_view v) { return "corpus-" + std::string(v) + ".sql"; }
std::string stats_report_name(std::string_view v) { return "stats-" + std::string(v) + ".json"; }
std::string manifest_name(std::string_view v) { return "MANIFEST-" + std::string(v); }

ReleaseContent release_content(const CorpusSnapshot& snapshot, std::string_view version_id) {
  ReleaseContent c;
  c.version_id = std::string(version_id);
  c.date = release_date(version_id);
  std::set<std::string> profile_ids;
  for (const auto& m : snapshot.messages) {
    if (m.status != Status::approved) continue;
    Message r = m;
    r.batch_id.clear();
    c.messages.push_back(std::move(r));
    if (m.profile_id) profile_ids.insert(*m.profile_id);
  }
  std::sort(c.messages.begin(), c.messages.end(),
            [](const Message& a, const Message& b) { return a.id < b.id; });
  for (const auto& p : snapshot.profiles) {
    if (profile_ids.count(p.id)) c.profiles.push_back(p);
  }
  std::sort(c.profiles.begin(), c.profiles.end(),
            [](const UserProfile& a, const UserProfile& b) { return a.id < b.id; });
  return c;
}

std::string render_release_xml(const ReleaseContent& content) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<smsCorpus";
  attr(out, "version", content.version_id);
  attr(out, "date", content.date);
  out += ">\n";
  for (const auto& m : content.messages) {
    out += "  <message";
    attr(out, "id", m.id);
    attr(out, "language", to_string(m.language));
    attr(out, "method", to_string(m.collection_method));
    attr(out, "source", to_string(m.source));
    if (m.profile_id) attr(out, "profile", *m.profile_id);
    if (m.sent_at) attr(out, "time", format_iso8601(*m.sent_at));
    if (m.sender_token) attr(out, "sender", *m.sender_token);
    if (m.receiver_token) attr(out, "receiver", *m.receiver_token);
    out += '>';
    out += xml::escape_text(m.body);
    out += "</message>\n";
  }
  for (const auto& p : content.profiles) {
    out += "  <profile";
    attr(out, "id", p.id);
    for (auto field : kProfileFields) attr(out, field, *profile_field(p, field));
    out += "/>\n";
  }
  out += "</smsCorpus>\n";
  return out;
}

std::string render_release_sql(const ReleaseContent& content) {
  std::string out;
  out += "-- smscorpus release " + content.version_id + "\n";
  out +=
      "CREATE TABLE profiles (\n"
      "  id VARCHAR(64) PRIMARY KEY,\n"
      "  age VARCHAR(16) NOT NULL,\n"
      "  gender VARCHAR(16) NOT NULL,\n"
      "  country VARCHAR(128) NOT NULL,\n"
      "  native VARCHAR(16) NOT NULL,\n"
      "  input VARCHAR(128) NOT NULL,\n"
      "  daily VARCHAR(16) NOT NULL,\n"
      "  years VARCHAR(16) NOT NULL,\n"
      "  brand VARCHAR(128) NOT NULL,\n"
      "  model VARCHAR(128) NOT NULL,\n"
      "  smartphone VARCHAR(16) NOT NULL\n"
      ");\n"
      "CREATE TABLE messages (\n"
      "  id VARCHAR(64) PRIMARY KEY,\n"
      "  language VARCHAR(16) NOT NULL,\n"
      "  method VARCHAR(16) NOT NULL,\n"
      "  source VARCHAR(16) NOT NULL,\n"
      "  profile_id VARCHAR(64) REFERENCES profiles(id),\n"
      "  sent_at VARCHAR(20),\n"
      "  sender VARCHAR(32),\n"
      "  receiver VARCHAR(32),\n"
      "  body TEXT NOT NULL\n"
      ");\n"
      "CREATE TABLE versions (\n"
      "  id VARCHAR(7) PRIMARY KEY,\n"
      "  release_date VARCHAR(10) NOT NULL,\n"
      "  count_en INTEGER NOT NULL,\n"
      "  count_zh INTEGER NOT NULL\n"
      ");\n";
  for (const auto& p : content.profiles) {
    out += "INSERT INTO profiles VALUES (" + sql_quote(p.id);
    for (auto field : kProfileFields) out += ", " + sql_quote(*profile_field(p, field));
    out += ");\n";
  }
  for (const auto& m : content.messages) {
    out += "INSERT INTO messages VALUES (" + sql_quote(m.id) + ", " +
           sql_quote(to_string(m.language)) + ", " + sql_quote(to_string(m.collection_method)) +
           ", " + sql_quote(to_string(m.source)) + ", " + sql_opt(m.profile_id) + ", " +
           (m.sent_at ? sql_quote(format_iso8601(*m.sent_at)) : std::string("NULL")) + ", " +
           sql_opt(m.sender_token) + ", " + sql_opt(m.receiver_token) + ", " +
           sql_quote(m.body) + ");\n";
  }
  out += "INSERT INTO versions VALUES (" + sql_quote(content.version_id) + ", " +
         sql_quote(content.date) + ", " + std::to_string(content.count(Language::english)) +
         ", " + std::to_string(content.count(Language::chinese)) + ");\n";
  return out;
}

ReleaseBundle build_release(const CorpusSnapshot& snapshot, std::string_view version_id,
                            const std::optional<CorpusVersion>& previous, Timestamp created_at) {
  if (!valid_version_id(version_id)) {
    throw CorpusError(ErrorCode::invalid_argument,
                      "version id must be YYYY-MM, got '" + std::string(version_id) + "'");
  }
  for (const auto& m : snapshot.messages) {
    if (m.status != Status::approved) {
      throw CorpusError(ErrorCode::invalid_argument,
                        "snapshot contains unapproved message " + m.id);
    }
  }
  const ReleaseContent content = release_content(snapshot, version_id);

  ReleaseBundle bundle;
  CorpusVersion& v = bundle.version;
  v.version_id = std::string(version_id);
  v.created_at = created_at;
  v.message_count_en = static_cast<std::int64_t>(content.count(Language::english));
  v.message_count_zh = static_cast<std::int64_t>(content.count(Language::chinese));
  if (previous) {
    if (v.version_id <= previous->version_id) {
      throw CorpusError(ErrorCode::non_monotone_version,
                        "version " + v.version_id + " is not after " + previous->version_id);
    }
    if (v.message_count_en < previous->message_count_en ||
        v.message_count_zh < previous->message_count_zh) {
      throw CorpusError(ErrorCode::shrinking_corpus,
                        "version " + v.version_id + " has fewer messages than " +
                            previous->version_id);
    }
  }

  auto add = [&](ArtifactKind kind, std::string name, std::string bytes) {
    ReleaseArtifact a{kind, std::move(name), std::move(bytes), {}};
    a.digest = crypto::sha256_hex(a.bytes);
    v.artifact_checksums[a.name] = a.digest;
    bundle.artifacts.push_back(std::move(a));
  };
  add(ArtifactKind::xml_dump, xml_dump_name(version_id), render_release_xml(content));
  add(ArtifactKind::sql_dump, sql_dump_name(version_id), render_release_sql(content));
  add(ArtifactKind::stats_report, stats_report_name(version_id),
      stats_report_json(snapshot, version_id));

  for (const auto& [name, digest] : v.artifact_checksums) {
    bundle.manifest += digest + "  " + name + "\n";
  }
  return bundle;
}

ReleaseContent parse_release_xml(std::string_view bytes) {
  ReleaseContent c;
  xml::Reader reader(bytes);
  xml::Event e;
  try {
    e = reader.next();
  } catch (const ParseError& err) {
    throw ParseError(ErrorCode::schema_violation, err.what(), err.line(), err.column());
  }
  if (e.kind != xml::Event::Kind::start_element || e.name != "smsCorpus") {
    schema_error("root element must be <smsCorpus>", e);
  }
  const std::string* version = e.attribute("version");
  const std::string* date = e.attribute("date");
  if (!version || !valid_version_id(*version)) schema_error("missing or invalid version", e);
  if (!date) schema_error("missing date", e);
  c.version_id = *version;
  c.date = *date;
  for (const auto& a : e.attributes) {
    if (a.name != "version" && a.name != "date") {
      c.warnings.push_back("line " + std::to_string(e.line) + ": unknown attribute " + a.name +
                           " on <smsCorpus>");
    }
  }

  auto warn_unknown = [&](const xml::Event& el, auto known) {
    for (const auto& a : el.attributes) {
      if (std::find(known.begin(), known.end(), a.name) == known.end()) {
        c.warnings.push_back("line " + std::to_string(el.line) + ": unknown attribute " +
                             a.name + " on <" + el.name + ">");
      }
    }
  };

  bool seen_profile = false;
  try {
    for (;;) {
      e = reader.next();
      if (e.kind == xml::Event::Kind::end_element) break;  // </smsCorpus>
      if (e.kind == xml::Event::Kind::text) {
        if (e.text.find_first_not_of(" \t\r\n") != std::string::npos) {
          schema_error("unexpected text in <smsCorpus>", e);
        }
        continue;
      }
      if (e.kind != xml::Event::Kind::start_element) schema_error("unexpected end", e);

      if (e.name == "message") {
        if (seen_profile) schema_error("<message> after <profile>", e);
        Message m;
        const std::string* id = e.attribute("id");
        if (!id || id->empty()) schema_error("<message> without id", e);
        m.id = *id;
        m.language = require_enum<Language>(e, "language");
        m.collection_method = require_enum<CollectionMethod>(e, "method");
        m.source = require_enum<Source>(e, "source");
        if (const auto* p = e.attribute("profile")) m.profile_id = *p;
        if (const auto* t = e.attribute("time")) {
          m.sent_at = parse_iso8601(*t);
          if (!m.sent_at) schema_error("invalid time '" + *t + "'", e);
        }
        if (const auto* s = e.attribute("sender")) m.sender_token = *s;
        if (const auto* r = e.attribute("receiver")) m.receiver_token = *r;
        m.status = Status::approved;
        std::array<std::string_view, 8> known{};
        std::copy(kMessageRequired.begin(), kMessageRequired.end(), known.begin());
        std::copy(kMessageOptional.begin(), kMessageOptional.end(), known.begin() + 4);
        warn_unknown(e, known);
        for (;;) {
          const xml::Event inner = reader.next();
          if (inner.kind == xml::Event::Kind::text) {
            m.body += inner.text;
          } else if (inner.kind == xml::Event::Kind::end_element) {
            break;
          } else {
            schema_error("unexpected element inside <message>", inner);
          }
        }
        if (!c.messages.empty() && !(c.messages.back().id < m.id)) {
          schema_error("message ids not strictly increasing at " + m.id, e);
        }
        c.messages.push_back(std::move(m));
      } else if (e.name == "profile") {
        seen_profile = true;
        UserProfile p;
        const std::string* id = e.attribute("id");
        if (!id || id->empty()) schema_error("<profile> without id", e);
        p.id = *id;
        for (auto field : kProfileFields) {
          const std::string* v = e.attribute(field);
          if (!v) schema_error("<profile> without " + std::string(field), e);
          set_profile_field(p, field, *v);
          if (*profile_field(p, field) != *v) {
            schema_error("invalid " + std::string(field) + " '" + *v + "'", e);
          }
        }
        std::array<std::string_view, kProfileFields.size() + 1> known{};
        known[0] = "id";
        std::copy(kProfileFields.begin(), kProfileFields.end(), known.begin() + 1);
        warn_unknown(e, known);
        const xml::Event end = reader.next();
        if (end.kind != xml::Event::Kind::end_element) {
          schema_error("<profile> must be empty", end);
        }
        if (!c.profiles.empty() && !(c.profiles.back().id < p.id)) {
          schema_error("profile ids not strictly increasing at " + p.id, e);
        }
        c.profiles.push_back(std::move(p));
      } else {
        schema_error("unknown element <" + e.name + ">", e);
      }
    }
    e = reader.next();
    if (e.kind != xml::Event::Kind::end_of_document) schema_error("content after root", e);
  } catch (const ParseError& err) {
    if (err.code() == ErrorCode::schema_violation) throw;
    throw ParseError(ErrorCode::schema_violation, err.what(), err.line(), err.column());
  }

  std::set<std::string> profile_ids;
  for (const auto& p : c.profiles) profile_ids.insert(p.id);
  for (const auto& m : c.messages) {
    if (m.profile_id && !profile_ids.count(*m.profile_id)) {
      throw ParseError(ErrorCode::schema_violation,
                       "release xml: message " + m.id + " references missing profile " +
                           *m.profile_id);
    }
  }
  return c;
}

std::map<std::string, std::size_t> sql_dump_row_counts(std::string_view sql) {
  sqlite3* raw = nullptr;
  if (sqlite3_open(":memory:", &raw) != SQLITE_OK) {
    sqlite3_close(raw);
    throw CorpusError(ErrorCode::storage, "cannot open scratch database");
  }
  std::unique_ptr<sqlite3, int (*)(sqlite3*)> db(raw, sqlite3_close);
  const std::string script(sql);
  char* err = nullptr;
  if (sqlite3_exec(raw, script.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw CorpusError(ErrorCode::schema_violation, "sql dump does not load: " + msg);
  }
  std::map<std::string, std::size_t> out;
  for (const char* table : {"messages", "profiles", "versions"}) {
    sqlite3_stmt* stmt = nullptr;
    const std::string q = std::string("SELECT COUNT(*) FROM ") + table;
    if (sqlite3_prepare_v2(raw, q.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
      throw CorpusError(ErrorCode::schema_violation,
                        std::string("sql dump lacks table ") + table);
    }
    if (sqlite3_step(stmt) == SQLITE_ROW) {
      out[table] = static_cast<std::size_t>(sqlite3_column_int64(stmt, 0));
    }
    sqlite3_finalize(stmt);
  }
  return out;
}

std::map<std::string, std::string> parse_manifest(std::string_view manifest) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!manifest.empty()) {
    const std::size_t nl = manifest.find('\n');
    std::string_view line = manifest.substr(0, nl);
    manifest = nl == std::string_view::npos ? std::string_view{} : manifest.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::size_t sep = line.find("  ");
    if (sep != 64 || line.size() <= sep + 2) {
      throw CorpusError(ErrorCode::malformed,
                        "manifest line " + std::to_string(line_no) + " is not '<sha256>  <name>'");
    }
    out[std::string(line.substr(sep + 2))] = std::string(line.substr(0, sep));
  }
  return out;
}

bool Changelog::empty() const {
  if (!added_message_ids.empty() || !added_profile_ids.empty()) return false;
  return std::all_of(count_deltas.begin(), count_deltas.end(),
                     [](const auto& kv) { return kv.second == 0; });
}

Changelog diff_releases(const ReleaseContent& v1, const ReleaseContent& v2) {
  if (v1.version_id > v2.version_id) {
    throw CorpusError(ErrorCode::incomparable_versions,
                      v1.version_id + " is newer than " + v2.version_id);
  }
  std::set<std::string> ids2;
  for (const auto& m : v2.messages) ids2.insert(m.id);
  std::set<std::string> ids1;
  for (const auto& m : v1.messages) {
    if (!ids2.count(m.id)) {
      throw CorpusError(ErrorCode::incomparable_versions,
                        "message " + m.id + " of " + v1.version_id + " is missing from " +
                            v2.version_id);
    }
    ids1.insert(m.id);
  }
  Changelog log;
  for (const auto& m : v2.messages) {
    if (!ids1.count(m.id)) log.added_message_ids.push_back(m.id);
  }
  std::set<std::string> p1;
  for (const auto& p : v1.profiles) p1.insert(p.id);
  for (const auto& p : v2.profiles) {
    if (!p1.count(p.id)) log.added_profile_ids.push_back(p.id);
  }
  for (Language l : enum_values<Language>()) {
    log.count_deltas[l] =
        static_cast<long long>(v2.count(l)) - static_cast<long long>(v1.count(l));
  }
  return log;
}

VerifyReport verify_release(std::string_view version_id,
                            const std::map<std::string, std::string>& files_by_name,
                            std::string_view manifest) {
  VerifyReport r;
  auto problem = [&](std::string what) {
    r.ok = false;
    r.problems.push_back(std::move(what));
  };

  std::map<std::string, std::string> digests;
  try {
    digests = parse_manifest(manifest);
  } catch (const CorpusError& e) {
    problem(std::string("manifest: ") + e.what());
  }
  const std::array<std::string, 3> names = {xml_dump_name(version_id), sql_dump_name(version_id),
                                            stats_report_name(version_id)};
  for (const auto& name : names) {
    const auto file = files_by_name.find(name);
    const auto listed = digests.find(name);
    if (file == files_by_name.end()) {
      problem("missing file " + name);
    } else if (listed == digests.end()) {
      problem("manifest does not list " + name);
    } else if (crypto::sha256_hex(file->second) != listed->second) {
      problem("digest mismatch for " + name);
    }
  }

  const auto xml_file = files_by_name.find(names[0]);
  if (xml_file != files_by_name.end()) {
    try {
      const ReleaseContent content = parse_release_xml(xml_file->second);
      r.xml_messages = content.messages.size();
      r.xml_profiles = content.profiles.size();
      if (content.version_id != version_id) {
        problem("xml declares version " + content.version_id);
      }
      if (render_release_xml(content) != xml_file->second) {
        problem("xml does not round-trip byte-identically");
      }
      for (const auto& m : content.messages) {
        if (const auto hit = find_residual(m.body)) {
          problem("message " + m.id + " contains a scrubbable span");
        }
        for (const auto* token : {&m.sender_token, &m.receiver_token}) {
          if (*token && looks_like_phone_number(**token)) {
            problem("message " + m.id + " exposes a phone number");
          }
        }
      }
      if (!content.warnings.empty()) {
        problem("xml has unknown attributes: " + content.warnings.front());
      }
    } catch (const CorpusError& e) {
      problem(std::string("xml: ") + e.what());
    }
  }

  const auto sql_file = files_by_name.find(names[1]);
  if (sql_file != files_by_name.end()) {
    try {
      const auto counts = sql_dump_row_counts(sql_file->second);
      r.sql_messages = counts.count("messages") ? counts.at("messages") : 0;
      r.sql_profiles = counts.count("profiles") ? counts.at("profiles") : 0;
      if (r.sql_messages != r.xml_messages || r.sql_profiles != r.xml_profiles) {
        problem("sql row counts differ from xml");
      }
      if (!counts.count("versions") || counts.at("versions") != 1) {
        problem("sql dump must hold exactly one versions row");
      }
    } catch (const CorpusError& e) {
      problem(std::string("sql: ") + e.what());
    }
  }

  const auto stats_file = files_by_name.find(names[2]);
  if (stats_file != files_by_name.end()) {
    const auto doc = nlohmann::json::parse(stats_file->second, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      problem("stats report is not a JSON object");
    } else if (doc.value("version", nlohmann::json()) != std::string(version_id)) {
      problem("stats report names a different version");
    }
  }
  return r;
}

}  // namespace smscorpus
