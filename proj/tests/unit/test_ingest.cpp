#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/ingest.hpp"

using namespace smscorpus;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const CorpusError& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io;
}

std::string transcription(std::string_view language, std::size_t declared, std::size_t actual) {
  std::string s = "SMS-CORPUS-TRANSCRIPTION v1\nlanguage: " + std::string(language) +
                  "\ncount: " + std::to_string(declared) + "\n";
  for (std::size_t i = 0; i < actual; ++i) s += "--msg--\n消息" + std::to_string(i) + "\n";
  return s;
}

crypto::Bytes secret(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("transcription form") {
  const auto rec = parse_transcription(fixtures::read("ingest/transcription_en5.txt"));
  CHECK(rec.declared_language == Language::english);
  REQUIRE(rec.messages.size() == 5);
  CHECK(rec.messages[3].body_raw == "Can you send me the notes\nfor chapter two pls");
  for (const auto& m : rec.messages) {
    CHECK_FALSE(m.sender_raw);
    CHECK_FALSE(m.receiver_raw);
    CHECK_FALSE(m.sent_at);
  }

  CHECK(code_of([] { parse_transcription(transcription("english", 0, 0)); }) ==
        ErrorCode::count_out_of_bounds);
  CHECK(code_of([] { parse_transcription(transcription("chinese", 21, 21)); }) ==
        ErrorCode::count_out_of_bounds);
  CHECK(parse_transcription(transcription("chinese", 20, 20)).messages.size() == 20);
  CHECK(code_of([] { parse_transcription(transcription("chinese", 3, 2)); }) ==
        ErrorCode::count_out_of_bounds);
  CHECK(code_of([] {
          parse_transcription("SMS-CORPUS-TRANSCRIPTION v1\nlanguage: english\ncount: 2\n"
                              "--msg--\nhi\n--msg--\n   \n");
        }) == ErrorCode::empty_slot);
  CHECK(code_of([] { parse_transcription(transcription("klingon", 1, 1)); }) ==
        ErrorCode::malformed);
}

TEST_CASE("csv export keeps sent rows only") {
  const auto parsed = parse_export(fixtures::read("ingest/export_3rows.csv"));
  REQUIRE(parsed.messages.size() == 2);
  REQUIRE(parsed.warnings.size() == 1);
  CHECK(parsed.warnings[0].find("received") != std::string::npos);
  CHECK(parsed.messages[0].receiver_raw == "+65 9123 4567");
  CHECK(parsed.messages[1].body_raw == "He said \"no way\" lol");
  CHECK(format_iso8601(*parsed.messages[0].sent_at) == "2011-10-03T01:15:00Z");
}

TEST_CASE("xml export carries timestamps") {
  const auto parsed = parse_export(fixtures::read("ingest/export_timestamps.xml"));
  REQUIRE(parsed.messages.size() == 2);
  CHECK(parsed.messages[0].body_raw == "我们明天见");
  CHECK(format_iso8601(*parsed.messages[0].sent_at) == "2011-09-30T04:00:00Z");
  CHECK(parsed.messages[1].body_raw == "See you & her at 5");
  CHECK(format_iso8601(*parsed.messages[1].sent_at) == "2011-09-30T13:00:00Z");
}

TEST_CASE("export errors") {
  CHECK(code_of([] { parse_export(""); }) == ErrorCode::no_schema);
  CHECK(code_of([] { parse_export("direction,peer_number,timestamp,body\ninbox,1,,x\n"); }) ==
        ErrorCode::zero_messages);
  CHECK(code_of([] { parse_export("direction,peer_number,timestamp,body\nsent,1,,\"open\n"); }) ==
        ErrorCode::malformed);
  CHECK(code_of([] { parse_export("<messages><message direction=\"sent\">x</messages>"); }) ==
        ErrorCode::malformed);
  CHECK(code_of([] { parse_export("\xFF\xFE"); }) == ErrorCode::undecodable);
}

TEST_CASE("upload draft grammar") {
  const auto draft = parse_upload_draft(fixtures::read("ingest/draft_4.txt"));
  CHECK(draft.device_id_token == "dev-7f3a");
  REQUIRE(draft.messages.size() == 4);
  CHECK(draft.messages[0].body_raw == "mail me at <EMAIL> later");
  CHECK(draft.messages[0].receiver_raw == "P0123456789abcdef");
  CHECK_FALSE(draft.messages[1].sent_at);
  CHECK(draft.messages[3].body_raw == "two line\nmessage");
  CHECK(parse_upload_draft(format_upload_draft(draft)) == draft);

  std::string no_code = fixtures::read("ingest/draft_4.txt");
  no_code.erase(no_code.find("code: "), std::string("code: 00000000\n").size());
  CHECK(code_of([&] { parse_upload_draft(no_code); }) == ErrorCode::missing_code);
  CHECK(code_of([] { parse_upload_draft("SMS-CORPUS-UPLOAD v1\ncode: 0123abcd\ndevice: d\ncount: 0\n"); }) ==
        ErrorCode::zero_messages);
  CHECK(code_of([] { parse_upload_draft("SMS-CORPUS-UPLOAD v2\n"); }) == ErrorCode::malformed);
}

TEST_CASE("upload verification") {
  auto draft = parse_upload_draft(fixtures::read("ingest/draft_4.txt"));
  const auto key = secret("device-secret");
  draft.verification_code = upload_verification_code(draft.device_id_token, 4, key);
  CHECK(draft.verification_code.size() == 8);
  CHECK(verify_upload(draft, key));
  CHECK_FALSE(verify_upload(draft, secret("other-secret")));

  auto fewer = draft;
  fewer.messages.pop_back();
  const auto recomputed = upload_verification_code(fewer.device_id_token, fewer.messages.size(), key);
  CHECK(recomputed != draft.verification_code);
  CHECK_FALSE(verify_upload(fewer, key));

  auto other_device = draft;
  other_device.device_id_token = "dev-0000";
  CHECK_FALSE(verify_upload(other_device, key));
}

TEST_CASE("format detection") {
  CHECK(detect_format(fixtures::read("ingest/export_3rows.csv")) == InputFormat::export_csv);
  CHECK(detect_format(fixtures::read("ingest/draft_4.txt")) == InputFormat::upload_draft);
  CHECK(detect_format(fixtures::read("ingest/export_timestamps.xml")) == InputFormat::export_xml);
  CHECK(detect_format(fixtures::read("ingest/transcription_en5.txt")) == InputFormat::transcription);
  CHECK(detect_format("\xEF\xBB\xBF" "Direction, Peer_Number,timestamp,body\n") == InputFormat::export_csv);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string junk(1 + rng() % 64, '\0');
    for (char& c : junk) c = static_cast<char>(rng() % 256);
    junk[0] = static_cast<char>(0x80 | (rng() % 64));
    CHECK(detect_format(junk) == InputFormat::unknown);
  }
}
