#include "smscorpus/service.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "smscorpus/crypto.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/stats.hpp"

namespace smscorpus {

namespace {

using Json = nlohmann::ordered_json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::undecodable:
    case ErrorCode::no_schema:
    case ErrorCode::malformed:
    case ErrorCode::missing_code:
    case ErrorCode::count_out_of_bounds:
    case ErrorCode::empty_slot:
    case ErrorCode::zero_messages:
      return 400;
    case ErrorCode::unauthorized: return 401;
    case ErrorCode::not_found: return 404;
    case ErrorCode::duplicate_id:
    case ErrorCode::conflict:
    case ErrorCode::non_monotone_version:
    case ErrorCode::shrinking_corpus:
      return 409;
    case ErrorCode::payload_too_large: return 413;
    case ErrorCode::invalid_argument:
    case ErrorCode::missing_profile:
    case ErrorCode::referential:
    case ErrorCode::invariant_violation:
    case ErrorCode::schema_violation:
    case ErrorCode::incomparable_versions:
    case ErrorCode::digest_mismatch:
      return 422;
    case ErrorCode::io:
    case ErrorCode::storage:
      return 500;
  }
  return 500;
}

HttpResponse json_response(int status, const Json& body) {
  return {status, "application/json", body.dump() + "\n"};
}

HttpResponse error_response(int status, std::string_view code, std::string_view detail,
                            Json extra = Json::object()) {
  Json body{{"error", code}, {"detail", detail}};
  for (auto& [k, v] : extra.items()) body[k] = v;
  return json_response(status, body);
}

HttpResponse error_response(const CorpusError& e, Json extra = Json::object()) {
  return error_response(http_status(e.code()), to_string(e.code()), e.what(), std::move(extra));
}

Json optional_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

Json message_json(const Message& m) {
  return Json{{"id", m.id},
              {"body", m.body},
              {"language", to_string(m.language)},
              {"method", to_string(m.collection_method)},
              {"source", to_string(m.source)},
              {"profile_id", optional_string(m.profile_id)},
              {"sent_at", m.sent_at ? Json(format_iso8601(*m.sent_at)) : Json(nullptr)},
              {"sender", optional_string(m.sender_token)},
              {"receiver", optional_string(m.receiver_token)}};
}

Json money_json(const std::optional<Money>& m) {
  if (!m) return nullptr;
  return Json{{"amount", format_amount(m->cents)}, {"currency", to_string(m->currency)}};
}

Json batch_json(const SubmissionBatch& b) {
  return Json{{"id", b.id},
              {"contributor_ref", b.contributor_ref},
              {"method", to_string(b.collection_method)},
              {"source", to_string(b.source)},
              {"received_at", format_iso8601(b.received_at)},
              {"message_count", b.message_ids.size()},
              {"status", to_string(b.status)},
              {"rejection_reason", optional_string(b.rejection_reason)},
              {"reward", money_json(b.reward)},
              {"attested_personal", b.attested_personal}};
}

Json report_json(const QualityReport& r) {
  Json langs = Json::object();
  for (const auto& [lang, n] : r.language_counts) langs[std::string(to_string(lang))] = n;
  return Json{{"batch_id", r.batch_id},
              {"message_count", r.message_count},
              {"language_counts", std::move(langs)},
              {"exact_dup_count", r.exact_dup_count},
              {"near_dup_count", r.near_dup_count},
              {"blocklist_hit_count", r.blocklist_hit_count},
              {"recommendation", to_string(r.recommendation)},
              {"reasons", r.reasons}};
}

Json reward_json(const RewardResult& r) {
  return Json{{"amount", format_amount(r.amount.cents)},
              {"currency", to_string(r.amount.currency)},
              {"below_minimum", r.below_minimum},
              {"bracket", r.bracket ? Json(*r.bracket + 1) : Json(nullptr)}};
}

Json scheme_json(const RewardScheme& s) {
  Json brackets = Json::array();
  for (const auto& b : s.brackets()) {
    brackets.push_back({{"lower", b.lower},
                        {"upper", b.upper ? Json(*b.upper) : Json(nullptr)},
                        {"base", format_amount(b.base_cents)},
                        {"divisor", b.divisor ? Json(*b.divisor) : Json(nullptr)}});
  }
  return Json{{"name", s.name()},
              {"currency", to_string(s.currency())},
              {"cap", format_amount(s.cap_cents())},
              {"brackets", std::move(brackets)}};
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t start = i;
    while (i < path.size() && path[i] != '/') ++i;
    if (i > start) out.emplace_back(path.substr(start, i - start));
  }
  return out;
}

std::optional<std::size_t> parse_size(const std::string& s) {
  if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), ::isdigit)) return std::nullopt;
  return static_cast<std::size_t>(std::stoul(s));
}

std::string artifact_content_type(std::string_view name) {
  if (name.ends_with(".xml")) return "application/xml; charset=utf-8";
  if (name.ends_with(".json")) return "application/json";
  if (name.ends_with(".sql")) return "application/sql; charset=utf-8";
  return "text/plain; charset=utf-8";
}

}  // namespace

struct CorpusService::Server {
  httplib::Server http;
  std::thread thread;
};

CorpusService::CorpusService(Store& store, const Toolkit& toolkit, ServiceOptions options)
    : store_(store), toolkit_(toolkit), options_(options) {}

CorpusService::~CorpusService() { stop(); }

HttpResponse CorpusService::handle(const HttpRequest& request) {
  const auto parts = split_path(request.path);
  const std::string& method = request.method;

  auto authorized = [&]() {
    const auto it = request.headers.find("authorization");
    if (it == request.headers.end()) return false;
    constexpr std::string_view kBearer = "Bearer ";
    if (!std::string_view(it->second).starts_with(kBearer)) return false;
    return crypto::constant_time_equal(std::string_view(it->second).substr(kBearer.size()),
                                       toolkit_.secrets.admin_token);
  };
  auto unauthorized = [] {
    return error_response(401, "unauthorized", "missing or invalid maintainer token");
  };

  try {
    if (request.body.size() > options_.max_payload_bytes) {
      return error_response(413, "payload_too_large",
                            "body exceeds " + std::to_string(options_.max_payload_bytes) + " bytes");
    }

    if (parts.size() == 1 && parts[0] == "health" && method == "GET") {
      return json_response(200, Json{{"status", "ok"}});
    }

    // POST /submissions
    if (parts.size() == 1 && parts[0] == "submissions") {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
      Submission sub;
      const auto doc = Json::parse(request.body, nullptr, false);
      if (doc.is_discarded() || !doc.is_object() || !doc.contains("payload") ||
          !doc["payload"].is_string()) {
        return error_response(400, "malformed",
                              "body must be a JSON object with a string 'payload'");
      }
      sub.payload = doc["payload"].get<std::string>();
      if (doc.contains("method") && !doc["method"].is_null()) {
        const auto m = parse_enum<CollectionMethod>(doc["method"].get<std::string>());
        if (!m) return error_response(400, "invalid_argument", "unknown method");
        sub.declared_method = m;
      }
      if (doc.contains("source") && !doc["source"].is_null()) {
        const auto s = parse_enum<Source>(doc["source"].get<std::string>());
        if (!s) return error_response(400, "invalid_argument", "unknown source");
        sub.source = *s;
      }
      if (doc.contains("contributor") && doc["contributor"].is_string()) {
        sub.contributor = doc["contributor"].get<std::string>();
      }
      if (doc.contains("profile") && doc["profile"].is_object()) {
        sub.profile = profile_from_json(doc["profile"].dump());
      }
      sub.attested_personal = doc.value("attested_personal", false);
      const InputFormat detected = detect_format(sub.payload);
      try {
        const auto result = submit(store_, toolkit_, sub);
        return json_response(201, Json{{"batch_id", result.batch_id},
                                       {"format", to_string(result.format)},
                                       {"message_ids", result.message_ids},
                                       {"profile_id", optional_string(result.profile_id)},
                                       {"warnings", result.warnings},
                                       {"report", report_json(result.report)}});
      } catch (const CorpusError& e) {
        const int status = e.code() == ErrorCode::unauthorized ? 401
                           : e.code() == ErrorCode::invalid_argument ? 400
                                                                     : http_status(e.code());
        return error_response(status, to_string(e.code()), e.what(),
                              Json{{"detect_format", to_string(detected)}});
      }
    }

    // GET /corpus/messages
    if (parts.size() == 2 && parts[0] == "corpus" && parts[1] == "messages" && method == "GET") {
      Page page;
      std::map<std::string, std::string> filters;
      for (const auto& [key, value] : request.query) {
        if (key == "offset" || key == "limit") {
          const auto n = parse_size(value);
          if (!n) return error_response(422, "invalid_argument", key + " must be a count");
          (key == "offset" ? page.offset : page.limit) = *n;
        } else if (key == "status") {
          return error_response(422, "invalid_argument", "only approved messages are browsable");
        } else if (!value.empty()) {
          filters[key] = value;
        }
      }
      if (page.limit > kMaxPageLimit) {
        return error_response(422, "invalid_argument",
                              "limit exceeds " + std::to_string(kMaxPageLimit));
      }
      MessageFilter filter;
      try {
        filter = MessageFilter::parse(filters);
      } catch (const CorpusError& e) {
        return error_response(422, to_string(e.code()), e.what());
      }
      filter.status = Status::approved;
      const auto result = store_.query_messages(filter, page);
      Json messages = Json::array();
      for (const auto& m : result.messages) messages.push_back(message_json(m));
      return json_response(200, Json{{"total", result.total},
                                     {"offset", page.offset},
                                     {"limit", page.limit},
                                     {"messages", std::move(messages)}});
    }

    if (parts.size() == 1 && parts[0] == "stats" && method == "GET") {
      const auto snapshot = store_.snapshot(true);
      return {200, "application/json", stats_report_json(snapshot)};
    }

    if (!parts.empty() && parts[0] == "releases" && method == "GET") {
      if (parts.size() == 1) {
        Json list = Json::array();
        for (const auto& v : store_.versions()) {
          list.push_back({{"version_id", v.version_id},
                          {"created_at", format_iso8601(v.created_at)},
                          {"message_count_en", v.message_count_en},
                          {"message_count_zh", v.message_count_zh},
                          {"artifacts", v.artifact_checksums}});
        }
        return json_response(200, Json{{"releases", std::move(list)}});
      }
      if (parts.size() == 3) {
        const auto a = store_.artifact(parts[1], parts[2]);
        if (!a) {
          return error_response(404, "not_found",
                                "no artifact " + parts[2] + " in release " + parts[1]);
        }
        return {200, artifact_content_type(a->name), a->bytes};
      }
    }

    if (!parts.empty() && parts[0] == "schemes" && method == "GET") {
      if (parts.size() == 1) {
        Json list = Json::array();
        for (const auto& name : toolkit_.schemes.names()) {
          list.push_back(scheme_json(*toolkit_.schemes.find(name)));
        }
        return json_response(200, Json{{"schemes", std::move(list)}});
      }
      if (parts.size() == 3 && parts[2] == "reward") {
        const RewardScheme* scheme = toolkit_.schemes.find(parts[1]);
        if (!scheme) return error_response(404, "not_found", "unknown scheme " + parts[1]);
        const auto it = request.query.find("n");
        const auto n = it == request.query.end() ? std::nullopt : parse_size(it->second);
        if (!n) return error_response(422, "invalid_argument", "n must be a message count");
        return json_response(200, reward_json(compute_reward(*scheme, static_cast<std::int64_t>(*n))));
      }
    }

    if (!parts.empty() && parts[0] == "moderation") {
      if (!authorized()) return unauthorized();
      if (parts.size() == 2 && parts[1] == "queue" && method == "GET") {
        Json items = Json::array();
        const auto snapshot = store_.snapshot(false);
        for (const auto& b : store_.list_batches(Status::pending)) {
          const auto messages = store_.batch_messages(b.id);
          const auto index = reference_index(snapshot, b.id, toolkit_.blocklist);
          Json preview = Json::array();
          for (const auto& m : messages) preview.push_back(message_json(m));
          items.push_back({{"batch", batch_json(b)},
                           {"report", report_json(quality_report(b.id, messages, index,
                                                                 toolkit_.policy))},
                           {"messages", std::move(preview)}});
        }
        return json_response(200, Json{{"batches", std::move(items)}});
      }
      if (parts.size() == 2 && parts[1] == "approval-rates" && method == "GET") {
        const auto table = approval_rates(store_.list_batches());
        Json cells = Json::array();
        for (const auto& [key, cell] : table.cells) {
          cells.push_back({{"method", to_string(key.first)},
                           {"source", to_string(key.second)},
                           {"approved", cell.approved},
                           {"rejected", cell.rejected},
                           {"rate", round_to(100.0 * cell.rate(), 2)}});
        }
        const auto overall = table.overall();
        return json_response(200, Json{{"cells", std::move(cells)},
                                       {"overall", overall ? Json(round_to(100.0 * *overall, 2))
                                                           : Json(nullptr)}});
      }
      if (parts.size() == 3 && parts[2] == "decision" && method == "POST") {
        const auto doc = Json::parse(request.body, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("decision") ||
            !doc["decision"].is_string()) {
          return error_response(400, "malformed", "body must carry a string 'decision'");
        }
        const std::string d = doc["decision"].get<std::string>();
        if (d != "approve" && d != "reject") {
          return error_response(422, "invalid_argument", "decision must be approve or reject");
        }
        std::optional<std::string> reason;
        if (doc.contains("reason") && doc["reason"].is_string()) {
          reason = doc["reason"].get<std::string>();
        }
        const RewardScheme* scheme = nullptr;
        if (doc.contains("scheme") && doc["scheme"].is_string()) {
          scheme = toolkit_.schemes.find(doc["scheme"].get<std::string>());
          if (!scheme) {
            return error_response(422, "invalid_argument",
                                  "unknown scheme " + doc["scheme"].get<std::string>());
          }
        }
        const auto outcome = moderate(store_, parts[1],
                                      d == "approve" ? Decision::approve : Decision::reject,
                                      reason, scheme, toolkit_.policy);
        return json_response(200, Json{{"batch", batch_json(outcome.batch)},
                                       {"reward", outcome.reward ? reward_json(*outcome.reward)
                                                                 : Json(nullptr)}});
      }
    }

    if (parts.size() == 3 && parts[0] == "batches" && parts[2] == "report" && method == "GET") {
      if (!authorized()) return unauthorized();
      return json_response(200, report_json(report_for_batch(store_, toolkit_, parts[1])));
    }

    return error_response(404, "not_found", "no route for " + method + " " + request.path);
  } catch (const CorpusError& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

namespace {

void bridge(CorpusService& service, const httplib::Request& req, httplib::Response& res) {
  HttpRequest r;
  r.method = req.method;
  r.path = req.path;
  for (const auto& [k, v] : req.params) r.query.emplace(k, v);
  for (const auto& [k, v] : req.headers) {
    std::string name = k;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    r.headers.emplace(std::move(name), v);
  }
  r.body = req.body;
  const HttpResponse out = service.handle(r);
  res.status = out.status;
  res.set_content(out.body, out.content_type);
}

void route_all(CorpusService& service, httplib::Server& http) {
  const auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    bridge(service, req, res);
  };
  http.Get(".*", handler);
  http.Post(".*", handler);
  http.Put(".*", handler);
  http.Delete(".*", handler);
  http.Patch(".*", handler);
}

}  // namespace

void CorpusService::listen(const std::string& host, int port) {
  server_ = std::make_unique<Server>();
  auto& http = server_->http;
  http.set_payload_max_length(options_.max_payload_bytes);
  route_all(*this, http);
  if (!http.listen(host, port)) {
    throw CorpusError(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

int CorpusService::start_background(const std::string& host) {
  stop();
  server_ = std::make_unique<Server>();
  auto& http = server_->http;
  http.set_payload_max_length(options_.max_payload_bytes);
  route_all(*this, http);
  const int port = http.bind_to_any_port(host);
  if (port < 0) throw CorpusError(ErrorCode::io, "cannot bind " + host);
  server_->thread = std::thread([&http] { http.listen_after_bind(); });
  http.wait_until_ready();
  return port;
}

void CorpusService::stop() {
  if (!server_) return;
  server_->http.stop();
  if (server_->thread.joinable()) server_->thread.join();
  server_.reset();
}

}  // namespace smscorpus
