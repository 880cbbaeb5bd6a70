#include "smscorpus/config.hpp"

#include <fstream>
#include <sstream>

#include "smscorpus/error.hpp"

namespace smscorpus {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw CorpusError(ErrorCode::malformed,
                        "expected key=value on line " + std::to_string(line_no));
    }
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError(ErrorCode::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CorpusError(ErrorCode::io, "short write to " + path.string());
}

Secrets Secrets::parse(std::string_view text) {
  const auto kv = parse_key_values(text);
  auto require = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) {
      throw CorpusError(ErrorCode::invalid_argument, std::string("key file lacks ") + key);
    }
    return it->second;
  };
  Secrets s;
  s.pseudonym_key = PseudonymKey::from_hex(require("pseudonym_key"));
  const auto upload = crypto::from_hex(require("upload_secret"));
  if (!upload || upload->empty()) {
    throw CorpusError(ErrorCode::invalid_argument, "upload_secret must be hex");
  }
  s.upload_secret = *upload;
  s.admin_token = require("admin_token");
  return s;
}

Secrets Secrets::load(const std::filesystem::path& path) { return parse(read_file(path)); }

}  // namespace smscorpus
