#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "smscorpus/crypto.hpp"
#include "smscorpus/service.hpp"

using namespace smscorpus;
using Json = nlohmann::json;

namespace {

struct Harness {
  Store store = Store::in_memory();
  Toolkit toolkit = fixtures::toolkit();
  CorpusService service{store, toolkit, ServiceOptions{64 * 1024}};

  HttpResponse get(const std::string& path, std::map<std::string, std::string> query = {},
                   bool auth = false) {
    HttpRequest r{"GET", path, std::move(query), {}, {}};
    if (auth) r.headers["authorization"] = "Bearer " + toolkit.secrets.admin_token;
    return service.handle(r);
  }

  HttpResponse post(const std::string& path, const Json& body, bool auth = false) {
    HttpRequest r{"POST", path, {}, {}, body.dump()};
    if (auth) r.headers["authorization"] = "Bearer " + toolkit.secrets.admin_token;
    return service.handle(r);
  }

  std::string submit_csv(const std::string& csv, Source source = Source::local) {
    Json body{{"payload", csv},
              {"source", std::string(to_string(source))},
              {"profile", {{"age", "21-25"}}}};
    const auto res = post("/submissions", body);
    REQUIRE(res.status == 201);
    return Json::parse(res.body)["batch_id"];
  }
};

std::string csv_rows(const std::vector<std::string>& bodies) {
  std::string out = "direction,peer_number,timestamp,body\n";
  for (const auto& b : bodies) out += "sent,+6590000000,2011-10-01T10:00:00Z,\"" + b + "\"\n";
  return out;
}

Json body_of(const HttpResponse& r) { return Json::parse(r.body); }

}  // namespace

TEST_CASE("submission intake") {
  Harness h;
  const auto ok = h.post("/submissions", {{"payload", fixtures::read("ingest/export_3rows.csv")},
                                          {"source", "local"},
                                          {"profile", {{"gender", "male"}}}});
  CHECK(ok.status == 201);
  const auto doc = body_of(ok);
  CHECK(doc["batch_id"] == "B000001");
  CHECK(doc["format"] == "export_csv");
  CHECK(doc["report"]["recommendation"] == "approve");
  CHECK(doc["message_ids"].size() == 2);

  const auto bad_code = h.post("/submissions", {{"payload", fixtures::read("ingest/draft_4.txt")}});
  CHECK(bad_code.status == 401);
  CHECK(body_of(bad_code)["error"] == "unauthorized");

  const auto garbage = h.post("/submissions", {{"payload", "\x01\x02\x03 nothing"}});
  CHECK(garbage.status == 400);
  CHECK(body_of(garbage)["detect_format"] == "unknown");

  CHECK(h.service.handle({"POST", "/submissions", {}, {}, "not json"}).status == 400);
  CHECK(h.service.handle({"POST", "/submissions", {}, {}, std::string(70 * 1024, 'x')}).status == 413);
}

TEST_CASE("browsing approved messages") {
  Harness h;
  CHECK(body_of(h.get("/corpus/messages"))["total"] == 0);
  const auto en = h.submit_csv(csv_rows({"see you soon", "ok lah", "where are you"}));
  const auto zh = h.submit_csv(csv_rows({"我们明天见", "你在哪里"}));
  const auto pending = h.submit_csv(csv_rows({"still pending here"}));
  for (const auto& id : {en, zh}) {
    CHECK(h.post("/moderation/" + id + "/decision", {{"decision", "approve"}}, true).status == 200);
  }
  CHECK(body_of(h.get("/corpus/messages"))["total"] == 5);
  const auto chinese = body_of(h.get("/corpus/messages", {{"language", "chinese"}}));
  CHECK(chinese["total"] == 2);
  for (const auto& m : chinese["messages"]) CHECK(m["language"] == "chinese");
  CHECK(h.get("/corpus/messages", {{"limit", "5000"}}).status == 422);
  CHECK(h.get("/corpus/messages", {{"limit", "-1"}}).status == 422);
  CHECK(h.get("/corpus/messages", {{"status", "pending"}}).status == 422);
  CHECK(h.get("/corpus/messages", {{"language", "elvish"}}).status == 422);
  const auto page = body_of(h.get("/corpus/messages", {{"limit", "2"}, {"offset", "4"}}));
  CHECK(page["messages"].size() == 1);
}

TEST_CASE("stats, schemes and releases") {
  Harness h;
  const auto empty = h.get("/stats");
  CHECK(empty.status == 200);
  CHECK(body_of(empty)["summary"]["total_messages"] == 0);
  CHECK(h.get("/releases/2011-10/corpus-2011-10.xml").status == 404);

  const auto schemes = body_of(h.get("/schemes"));
  CHECK(schemes["schemes"].size() == 4);
  const auto reward = body_of(h.get("/schemes/mturk/reward", {{"n", "500"}}));
  CHECK(reward["amount"] == "4.50");
  CHECK(h.get("/schemes/nope/reward", {{"n", "5"}}).status == 404);
  CHECK(h.get("/schemes/mturk/reward").status == 422);

  const auto id = h.submit_csv(csv_rows({"see you soon", "ok lah"}));
  h.post("/moderation/" + id + "/decision", {{"decision", "approve"}}, true);
  const auto bundle = publish_release(h.store, "2011-10");
  const auto list = body_of(h.get("/releases"));
  CHECK(list["releases"][0]["version_id"] == "2011-10");
  for (const auto& a : bundle.artifacts) {
    const auto r = h.get("/releases/2011-10/" + a.name);
    CHECK(r.status == 200);
    CHECK(crypto::sha256_hex(r.body) == parse_manifest(bundle.manifest).at(a.name));
  }
  CHECK(h.get("/releases/2099-01/corpus-2099-01.xml").status == 404);
}

TEST_CASE("moderation endpoints") {
  Harness h;
  std::vector<std::string> bodies;
  for (std::size_t i = 0; i < 100; ++i) bodies.push_back(fixtures::english_body(i * 13));
  const auto id = h.submit_csv(csv_rows(bodies), Source::zhubajie);

  CHECK(h.get("/moderation/queue").status == 401);
  HttpRequest wrong{"GET", "/moderation/queue", {}, {{"authorization", "Bearer nope"}}, {}};
  CHECK(h.service.handle(wrong).status == 401);
  const auto queue = body_of(h.get("/moderation/queue", {}, true));
  CHECK(queue["batches"].size() == 1);
  CHECK(queue["batches"][0]["report"]["message_count"] == 100);

  CHECK(h.post("/moderation/" + id + "/decision", {{"decision", "approve"}}).status == 401);
  CHECK(h.post("/moderation/" + id + "/decision", {{"decision", "approve"}, {"scheme", "nope"}}, true)
            .status == 422);
  const auto ok = h.post("/moderation/" + id + "/decision",
                         {{"decision", "approve"}, {"scheme", "zhubajie1"}}, true);
  CHECK(ok.status == 200);
  const auto doc = body_of(ok);
  CHECK(doc["reward"]["amount"] == "10.00");
  CHECK(doc["reward"]["currency"] == "CNY");
  CHECK(doc["batch"]["status"] == "approved");
  const auto again = h.post("/moderation/" + id + "/decision", {{"decision", "reject"}}, true);
  CHECK(again.status == 409);
  CHECK(body_of(again)["error"] == "conflict");
  CHECK(h.post("/moderation/B999999/decision", {{"decision", "reject"}}, true).status == 404);

  const auto rates = body_of(h.get("/moderation/approval-rates", {}, true));
  CHECK(rates["cells"][0]["rate"] == 100.0);
  CHECK(h.get("/batches/" + id + "/report", {}, true).status == 200);
  CHECK(h.get("/batches/" + id + "/report").status == 401);
  CHECK(h.get("/nowhere").status == 404);
}

TEST_CASE("http transport") {
  Harness h;
  const int port = h.service.start_background();
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  const auto sub = client.Post("/submissions",
                               Json{{"payload", fixtures::read("ingest/export_3rows.csv")}}.dump(),
                               "application/json");
  REQUIRE(sub);
  CHECK(sub->status == 201);
  httplib::Headers auth{{"Authorization", "Bearer " + h.toolkit.secrets.admin_token}};
  const auto queue = client.Get("/moderation/queue", auth);
  REQUIRE(queue);
  CHECK(queue->status == 200);
  const auto page = client.Get("/corpus/messages?language=english&limit=10");
  REQUIRE(page);
  CHECK(page->status == 200);
  h.service.stop();
}
