#include "cli_driver.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "smscorpus/config.hpp"
#include "smscorpus/release.hpp"

namespace fs = std::filesystem;

namespace cli {

namespace {

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  return out + "'";
}

std::string slurp_tree(const fs::path& root) {
  std::string all;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() != "keys") all += smscorpus::read_file(e.path());
  }
  return all;
}

}  // namespace

std::string Result::value(const std::string& key) const {
  const auto v = values(key);
  return v.empty() ? std::string() : v.front();
}

std::vector<std::string> Result::values(const std::string& key) const {
  std::vector<std::string> found;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() > key.size() && line.compare(0, key.size(), key) == 0 && line[key.size()] == '=') {
      found.push_back(line.substr(key.size() + 1));
    }
  }
  return found;
}

Result run(const std::string& binary, const std::vector<std::string>& args) {
  const fs::path err_file =
      fs::temp_directory_path() / ("smscorpus-cli-err-" + std::to_string(::getpid()));
  std::string cmd = quote(binary);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(err_file.string());
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::error_code ec;
  if (fs::exists(err_file, ec)) {
    r.err = smscorpus::read_file(err_file);
    fs::remove(err_file, ec);
  }
  return r;
}

EndToEnd run_end_to_end(const std::string& binary, const fs::path& workdir) {
  EndToEnd e2e;
  auto fail = [&](const std::string& what, const Result& r) {
    e2e.failures.push_back(what + " (exit " + std::to_string(r.exit_code) + ": " + r.err + ")");
  };
  const std::string store = (workdir / "store").string();
  const std::string keys = (workdir / "keys").string();
  auto call = [&](std::vector<std::string> args) {
    std::vector<std::string> full = {"--store", store, "--keys", keys, "--data",
                                     fixtures::data_dir().string()};
    full.insert(full.end(), args.begin(), args.end());
    return run(binary, full);
  };

  if (auto r = call({"keygen"}); r.exit_code != 0) {
    fail("keygen", r);
    return e2e;
  }
  const auto code = call({"upload-code", "--device", "e2e-device-01", "--count", "5"});
  if (code.exit_code != 0 || code.value("code").size() != 8) {
    fail("upload-code", code);
    return e2e;
  }
  std::string draft = fixtures::read("e2e/draft_template.txt");
  draft.replace(draft.find("CODE"), 4, code.value("code"));
  smscorpus::write_file(workdir / "draft.txt", draft);

  struct Input {
    std::string file;
    std::string method;
    std::string source;
    std::string profile;
    std::string contributor;
    std::string scheme;
    std::size_t messages;
  };
  const std::vector<Input> inputs = {
      {fixtures::path("e2e/export.csv").string(), "export", "local", "e2e/profile_sg.json", "sg-student-1", "local", 15},
      {fixtures::path("e2e/export.xml").string(), "export", "zhubajie", "e2e/profile_cn.json", "zbj-worker-7", "zhubajie1", 10},
      {fixtures::path("e2e/transcription_en.txt").string(), "transcription", "mturk", "e2e/profile_sg.json", "mturk-A1", "mturk", 5},
      {fixtures::path("e2e/transcription_zh.txt").string(), "transcription", "zhubajie", "e2e/profile_cn.json", "zbj-worker-9", "zhubajie2", 15},
      {(workdir / "draft.txt").string(), "upload", "community", "e2e/profile_sg.json", "", "", 5},
  };

  std::vector<std::string> batches;
  for (const auto& in : inputs) {
    std::vector<std::string> args = {"ingest", in.file, "--method", in.method, "--source", in.source,
                                     "--profile", fixtures::path(in.profile).string(), "--attest"};
    if (!in.contributor.empty()) {
      args.push_back("--contributor");
      args.push_back(in.contributor);
    }
    const auto r = call(args);
    if (r.exit_code != 0) {
      fail("ingest " + in.file, r);
      continue;
    }
    if (r.value("messages") != std::to_string(in.messages)) fail("ingest count " + in.file, r);
    if (r.value("recommendation") != "approve") fail("report for " + in.file + ": " + r.out, r);
    batches.push_back(r.value("batch"));
  }
  if (batches.size() != inputs.size()) return e2e;

  const auto queue = call({"queue"});
  if (queue.exit_code != 0 || queue.value("pending") != "5") fail("queue", queue);

  for (std::size_t i = 0; i < batches.size(); ++i) {
    const auto report = call({"report", batches[i]});
    if (report.exit_code != 0 || report.value("recommendation") != "approve") fail("report", report);
    std::vector<std::string> args = {"moderate", batches[i], "approve"};
    if (!inputs[i].scheme.empty()) {
      args.push_back("--scheme");
      args.push_back(inputs[i].scheme);
    }
    const auto m = call(args);
    if (m.exit_code != 0 || m.value("status") != "approved") fail("moderate " + batches[i], m);
  }

  const auto stats = call({"stats"});
  if (stats.exit_code != 0) fail("stats", stats);
  e2e.messages = std::strtoul(stats.value("total_messages").c_str(), nullptr, 10);
  if (e2e.messages != 50) fail("stats total " + stats.value("total_messages"), stats);
  if (stats.value("english.messages").empty() || stats.value("chinese.messages").empty()) {
    fail("stats languages", stats);
  }
  const auto stats_json = call({"stats", "--json"});
  const auto doc = nlohmann::json::parse(stats_json.out, nullptr, false);
  if (stats_json.exit_code != 0 || doc.is_discarded() || doc["summary"]["total_messages"] != 50) {
    fail("stats --json", stats_json);
  }

  e2e.version = "2011-10";
  const auto build = call({"release", "build", e2e.version});
  if (build.exit_code != 0) {
    fail("release build", build);
    return e2e;
  }
  const auto verify = call({"release", "verify", e2e.version});
  if (verify.exit_code != 0 || verify.value("ok") != "true") fail("release verify", verify);
  const auto list = call({"release", "list"});
  if (list.exit_code != 0 || list.out.find("version=" + e2e.version) == std::string::npos) {
    fail("release list", list);
  }

  const fs::path dir = fs::path(store) / "releases" / e2e.version;
  const auto content =
      smscorpus::parse_release_xml(smscorpus::read_file(dir / smscorpus::xml_dump_name(e2e.version)));
  if (content.messages.size() != 50) fail("release holds " + std::to_string(content.messages.size()), build);
  for (const auto& m : content.messages) {
    if (oracle::has_residual(m.body)) fail("residual in " + m.id + ": " + m.body, build);
    for (const auto* t : {&m.sender_token, &m.receiver_token}) {
      if (*t && oracle::looks_like_phone(**t)) fail("phone-like token in " + m.id, build);
    }
  }
  const std::string secrets = smscorpus::read_file(keys);
  const auto stored = slurp_tree(store);
  for (const auto& [k, v] : smscorpus::parse_key_values(secrets)) {
    if (stored.find(v) != std::string::npos) fail("secret " + k + " leaked into the store", build);
  }
  for (const char* raw : {"9123 4567", "91112222", "prof.tan", "wang.lei", "13912345678", "U0912345J"}) {
    if (stored.find(raw) != std::string::npos) fail(std::string("raw text leaked: ") + raw, build);
  }
  return e2e;
}

}  // namespace cli
