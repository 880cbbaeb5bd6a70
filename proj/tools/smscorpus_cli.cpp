// smscorpus: operator command line for the corpus pipeline.
//
// Every command prints `key=value` lines on stdout. Failures print a single
// `error: code=<code> detail=<text>` line on stderr and exit nonzero.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smscorpus/crypto.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/pipeline.hpp"
#include "smscorpus/service.hpp"
#include "smscorpus/stats.hpp"
#include "smscorpus/utf8.hpp"

#ifndef SMSCORPUS_DEFAULT_DATA_DIR
#define SMSCORPUS_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace smscorpus;

namespace {

struct Options {
  std::string store;
  std::string keys;
  std::string data;
  std::string policy;
  std::string blocklist;
  std::string schemes;
  std::string emoticons;
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

// Keeps values on one line so output stays line-oriented.
std::string one_line(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out += c;
    }
  }
  return out;
}

void kv(std::string_view key, std::string_view value) {
  std::cout << key << '=' << one_line(value) << '\n';
}

template <typename T>
void kv(std::string_view key, const T& value) {
  std::cout << key << '=' << value << '\n';
}

fs::path data_path(const Options& o, const std::string& explicit_path, const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(o.data) / name;
}

Toolkit load_toolkit(const Options& o, bool need_secrets) {
  Toolkit t;
  if (need_secrets) t.secrets = Secrets::load(o.keys);
  t.policy = ModerationPolicy::load(data_path(o, o.policy, "policy.txt"));
  t.blocklist = load_blocklist(data_path(o, o.blocklist, "blocklist.txt"));
  t.schemes = SchemeRegistry::load_directory(data_path(o, o.schemes, "schemes"));
  const fs::path emoticons = data_path(o, o.emoticons, "emoticons.txt");
  if (!o.emoticons.empty() || fs::exists(emoticons)) t.emoticons = EmoticonTable::load(emoticons);
  return t;
}

void print_report(const QualityReport& r) {
  kv("batch", r.batch_id);
  kv("messages", r.message_count);
  for (const auto& [lang, n] : r.language_counts) kv("language." + std::string(to_string(lang)), n);
  kv("exact_dup_count", r.exact_dup_count);
  kv("near_dup_count", r.near_dup_count);
  kv("blocklist_hit_count", r.blocklist_hit_count);
  kv("recommendation", to_string(r.recommendation));
  for (const auto& reason : r.reasons) kv("reason", reason);
}

void print_batch(const SubmissionBatch& b) {
  kv("batch", b.id);
  kv("status", to_string(b.status));
  kv("method", to_string(b.collection_method));
  kv("source", to_string(b.source));
  kv("messages", b.message_ids.size());
  if (b.rejection_reason) kv("reason", *b.rejection_reason);
  if (b.reward) kv("reward", to_string(*b.reward));
}

std::map<std::string, std::string> release_files(const Store& store, const std::string& version,
                                                 std::string& manifest, std::string& origin) {
  std::map<std::string, std::string> files;
  const fs::path dir = store.root().empty() ? fs::path() : store.root() / "releases" / version;
  if (!dir.empty() && fs::exists(dir / manifest_name(version))) {
    origin = dir.string();
    manifest = read_file(dir / manifest_name(version));
    for (const auto& name :
         {xml_dump_name(version), sql_dump_name(version), stats_report_name(version)}) {
      if (fs::exists(dir / name)) files[name] = read_file(dir / name);
    }
    return files;
  }
  const auto m = store.artifact(version, manifest_name(version));
  if (!m) throw CorpusError(ErrorCode::not_found, "release not found: " + version);
  origin = "store";
  manifest = m->bytes;
  for (const auto& name :
       {xml_dump_name(version), sql_dump_name(version), stats_report_name(version)}) {
    if (auto a = store.artifact(version, name)) files[name] = a->bytes;
  }
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SMS live-corpus toolchain"};
  app.require_subcommand(1);
  Options o;
  o.store = env_or("SMSCORPUS_STORE", "./corpus-store");
  o.keys = env_or("SMSCORPUS_KEYS", "./smscorpus.keys");
  o.data = env_or("SMSCORPUS_DATA", SMSCORPUS_DEFAULT_DATA_DIR);
  app.add_option("--store", o.store, "Store directory (env SMSCORPUS_STORE)");
  app.add_option("--keys", o.keys, "Key file (env SMSCORPUS_KEYS)");
  app.add_option("--data", o.data, "Directory with default policy, blocklist and schemes");
  app.add_option("--policy", o.policy, "Moderation policy file");
  app.add_option("--blocklist", o.blocklist, "Blocklist file");
  app.add_option("--schemes", o.schemes, "Directory of *.scheme files");
  app.add_option("--emoticons", o.emoticons, "Emoticon table file");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Write a fresh key file");
  std::string keygen_out;
  keygen->add_option("--out", keygen_out, "Destination (default: --keys)");

  // upload-code
  auto* upload_code = app.add_subcommand("upload-code", "Verification code for an upload draft");
  std::string uc_device;
  std::size_t uc_count = 0;
  upload_code->add_option("--device", uc_device)->required();
  upload_code->add_option("--count", uc_count)->required();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Submit a channel file as a pending batch");
  std::string in_file, in_method, in_source = "community", in_profile, in_contributor;
  bool in_attest = false;
  ingest->add_option("file", in_file)->required()->check(CLI::ExistingFile);
  ingest->add_option("--method", in_method, "transcription|export|upload");
  ingest->add_option("--source", in_source, "mturk|shorttask|zhubajie|local|community");
  ingest->add_option("--profile", in_profile, "Survey answers as a JSON file")
      ->check(CLI::ExistingFile);
  ingest->add_option("--contributor", in_contributor, "Contributor reference");
  ingest->add_flag("--attest", in_attest, "Contributor attested personal, sent messages");

  // scrub
  auto* scrub = app.add_subcommand("scrub", "Anonymize arbitrary text");
  std::string scrub_file;
  scrub->add_option("file", scrub_file)->required()->check(CLI::ExistingFile);

  // report
  auto* report = app.add_subcommand("report", "Quality report for a batch");
  std::string report_batch;
  report->add_option("batch", report_batch)->required();

  // queue
  auto* queue = app.add_subcommand("queue", "List pending batches");

  // moderate
  auto* moderate_cmd = app.add_subcommand("moderate", "Approve or reject a pending batch");
  std::string mod_batch, mod_decision, mod_scheme, mod_reason;
  moderate_cmd->add_option("batch", mod_batch)->required();
  moderate_cmd->add_option("decision", mod_decision)
      ->required()
      ->check(CLI::IsMember({"approve", "reject"}));
  moderate_cmd->add_option("--scheme", mod_scheme, "Reward scheme name");
  moderate_cmd->add_option("--reason", mod_reason);

  // stats
  auto* stats = app.add_subcommand("stats", "Statistics over the approved corpus");
  std::string stats_language;
  bool stats_json = false;
  stats->add_option("--language", stats_language, "english|chinese|mixed|unknown");
  stats->add_flag("--json", stats_json, "Print the full JSON report");

  // release
  auto* release = app.add_subcommand("release", "Build, verify or list releases");
  release->require_subcommand(1);
  auto* release_build = release->add_subcommand("build", "Build and register a release");
  std::string rb_version;
  release_build->add_option("version", rb_version, "YYYY-MM")->required();
  auto* release_verify = release->add_subcommand("verify", "Round-trip and digest check");
  std::string rv_version;
  release_verify->add_option("version", rv_version)->required();
  auto* release_list = release->add_subcommand("list", "List registered releases");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  int serve_port = 8080;
  std::string serve_host = "127.0.0.1";
  std::size_t serve_max = 1 << 20;
  serve->add_option("--port", serve_port);
  serve->add_option("--host", serve_host);
  serve->add_option("--max-payload", serve_max, "Request body cap in bytes");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (keygen->parsed()) {
      const fs::path out = keygen_out.empty() ? fs::path(o.keys) : fs::path(keygen_out);
      if (fs::exists(out)) {
        throw CorpusError(ErrorCode::invalid_argument, out.string() + " already exists");
      }
      const std::string text =
          "pseudonym_key=" + crypto::to_hex(crypto::random_bytes(kPseudonymKeyBytes)) + "\n" +
          "upload_secret=" + crypto::to_hex(crypto::random_bytes(32)) + "\n" +
          "admin_token=" + crypto::to_hex(crypto::random_bytes(16)) + "\n";
      write_file(out, text);
      fs::permissions(out, fs::perms::owner_read | fs::perms::owner_write);
      kv("keys", out.string());
      return 0;
    }

    if (upload_code->parsed()) {
      const Secrets secrets = Secrets::load(o.keys);
      kv("code", upload_verification_code(uc_device, uc_count, secrets.upload_secret));
      return 0;
    }

    if (scrub->parsed()) {
      const Toolkit t = load_toolkit(o, false);
      std::cout << scrub_body(t.emoticons.normalize(utf8::sanitize(read_file(scrub_file))));
      return 0;
    }

    if (ingest->parsed()) {
      const Toolkit t = load_toolkit(o, true);
      Store store = Store::open(o.store);
      Submission sub;
      sub.payload = read_file(in_file);
      if (!in_method.empty()) {
        sub.declared_method = parse_enum<CollectionMethod>(in_method);
        if (!sub.declared_method) {
          throw CorpusError(ErrorCode::invalid_argument, "unknown method " + in_method);
        }
      }
      const auto source = parse_enum<Source>(in_source);
      if (!source) throw CorpusError(ErrorCode::invalid_argument, "unknown source " + in_source);
      sub.source = *source;
      if (!in_contributor.empty()) sub.contributor = in_contributor;
      if (!in_profile.empty()) sub.profile = profile_from_json(read_file(in_profile));
      sub.attested_personal = in_attest;
      const auto result = submit(store, t, sub);
      kv("format", to_string(result.format));
      if (result.profile_id) kv("profile", *result.profile_id);
      for (const auto& w : result.warnings) kv("warning", w);
      print_report(result.report);
      return 0;
    }

    if (report->parsed()) {
      const Toolkit t = load_toolkit(o, false);
      const Store store = Store::open(o.store);
      print_report(report_for_batch(store, t, report_batch));
      return 0;
    }

    if (queue->parsed()) {
      const Store store = Store::open(o.store);
      const auto pending = store.list_batches(Status::pending);
      kv("pending", pending.size());
      for (const auto& b : pending) {
        std::cout << "batch=" << b.id << " method=" << to_string(b.collection_method)
                  << " source=" << to_string(b.source) << " messages=" << b.message_ids.size()
                  << " received_at=" << format_iso8601(b.received_at) << '\n';
      }
      return 0;
    }

    if (moderate_cmd->parsed()) {
      const Toolkit t = load_toolkit(o, false);
      Store store = Store::open(o.store);
      const RewardScheme* scheme = nullptr;
      if (!mod_scheme.empty()) {
        scheme = t.schemes.find(mod_scheme);
        if (!scheme) throw CorpusError(ErrorCode::not_found, "unknown scheme " + mod_scheme);
      }
      std::optional<std::string> reason;
      if (!mod_reason.empty()) reason = mod_reason;
      const auto outcome =
          moderate(store, mod_batch, mod_decision == "approve" ? Decision::approve : Decision::reject,
                   reason, scheme, t.policy);
      print_batch(outcome.batch);
      if (outcome.reward && outcome.reward->below_minimum) kv("below_minimum", "true");
      return 0;
    }

    if (stats->parsed()) {
      const Store store = Store::open(o.store);
      const auto snapshot = store.snapshot(true);
      if (stats_json) {
        std::cout << stats_report_json(snapshot);
        return 0;
      }
      std::optional<Language> only;
      if (!stats_language.empty()) {
        only = parse_enum<Language>(stats_language);
        if (!only) throw CorpusError(ErrorCode::invalid_argument, "unknown language " + stats_language);
      }
      const auto summary = corpus_summary(snapshot);
      kv("total_messages", summary.total_messages);
      kv("total_contributors", summary.total_contributors);
      for (const auto& [lang, s] : summary.by_language) {
        if (only && lang != *only) continue;
        const std::string p = std::string(to_string(lang)) + ".";
        kv(p + "messages", s.messages);
        kv(p + "contributors", s.contributors);
        if (s.mean_per_contributor) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.1f", *s.mean_per_contributor);
          kv(p + "mean_per_contributor", std::string(buf));
        }
        const auto d = contributor_distribution(snapshot, lang);
        if (d.below_30_percent) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.1f", *d.below_30_percent);
          kv(p + "below_30_percent", std::string(buf));
        }
      }
      const auto rates = approval_rates(store.list_batches());
      for (const auto& [key, cell] : rates.cells) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", 100.0 * cell.rate());
        kv("approval." + std::string(to_string(key.first)) + "." +
               std::string(to_string(key.second)),
           std::string(buf));
      }
      return 0;
    }

    if (release_build->parsed()) {
      Store store = Store::open(o.store);
      const auto bundle = publish_release(store, rb_version);
      kv("version", bundle.version.version_id);
      kv("messages.english", bundle.version.message_count_en);
      kv("messages.chinese", bundle.version.message_count_zh);
      for (const auto& a : bundle.artifacts) kv("artifact." + a.name, a.digest);
      kv("directory", (store.root() / "releases" / rb_version).string());
      return 0;
    }

    if (release_verify->parsed()) {
      const Store store = Store::open(o.store);
      std::string manifest;
      std::string origin;
      const auto files = release_files(store, rv_version, manifest, origin);
      const auto r = verify_release(rv_version, files, manifest);
      kv("version", rv_version);
      kv("origin", origin);
      kv("xml_messages", r.xml_messages);
      kv("xml_profiles", r.xml_profiles);
      kv("sql_messages", r.sql_messages);
      kv("sql_profiles", r.sql_profiles);
      for (const auto& p : r.problems) kv("problem", p);
      kv("ok", r.ok ? "true" : "false");
      if (!r.ok) {
        std::cerr << "error: code=" << to_string(ErrorCode::digest_mismatch)
                  << " detail=release " << rv_version << " failed verification\n";
        return 1;
      }
      return 0;
    }

    if (release_list->parsed()) {
      const Store store = Store::open(o.store);
      for (const auto& v : store.versions()) {
        std::cout << "version=" << v.version_id << " created_at=" << format_iso8601(v.created_at)
                  << " english=" << v.message_count_en << " chinese=" << v.message_count_zh
                  << '\n';
      }
      return 0;
    }

    if (serve->parsed()) {
      const Toolkit t = load_toolkit(o, true);
      Store store = Store::open(o.store);
      CorpusService service(store, t, ServiceOptions{serve_max});
      std::cerr << "listening on " << serve_host << ':' << serve_port << '\n';
      service.listen(serve_host, serve_port);
      return 0;
    }
  } catch (const CorpusError& e) {
    std::cerr << "error: code=" << to_string(e.code()) << " detail=" << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: code=internal detail=" << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
