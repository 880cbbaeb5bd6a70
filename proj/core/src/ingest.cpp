#include "smscorpus/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "smscorpus/error.hpp"
#include "smscorpus/utf8.hpp"
#include "smscorpus/xml.hpp"

namespace smscorpus {

namespace {

constexpr std::string_view kCsvHeader = "direction,peer_number,timestamp,body";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool blank(std::string_view s) { return trim(s).empty(); }

/// Lines without their terminators; a final terminator does not start an
/// empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::string_view checked_utf8(std::string_view bytes) {
  bytes = utf8::strip_bom(bytes);
  if (!utf8::is_valid(bytes)) {
    throw ParseError(ErrorCode::undecodable, "payload is not valid UTF-8");
  }
  return bytes;
}

/// `key: value` header line.
std::optional<std::string_view> header_value(std::string_view line, std::string_view key) {
  if (line.size() <= key.size() || line.substr(0, key.size()) != key ||
      line[key.size()] != ':') {
    return std::nullopt;
  }
  return trim(line.substr(key.size() + 1));
}

std::optional<std::size_t> parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

std::size_t require_count(std::string_view line, std::size_t line_no) {
  const auto v = header_value(line, "count");
  if (!v) {
    throw ParseError(ErrorCode::malformed, "expected 'count: <n>' on line " + std::to_string(line_no),
                     line_no, 1);
  }
  const auto n = parse_count(*v);
  if (!n) {
    throw ParseError(ErrorCode::malformed, "count is not a number on line " + std::to_string(line_no),
                     line_no, 1);
  }
  return *n;
}

struct Block {
  std::size_t first_line = 0;  // 1-based line of the delimiter
  std::vector<std::string_view> lines;
};

/// Splits everything from `start` onward into `--msg--` blocks.
std::vector<Block> split_blocks(const std::vector<std::string_view>& lines, std::size_t start) {
  std::vector<Block> blocks;
  for (std::size_t i = start; i < lines.size(); ++i) {
    if (lines[i] == kMessageDelimiter) {
      blocks.push_back(Block{i + 1, {}});
      continue;
    }
    if (blocks.empty()) {
      if (blank(lines[i])) continue;
      throw ParseError(ErrorCode::malformed,
                       "expected '--msg--' on line " + std::to_string(i + 1), i + 1, 1);
    }
    blocks.back().lines.push_back(lines[i]);
  }
  return blocks;
}

std::string join_body(std::vector<std::string_view>::const_iterator begin,
                      std::vector<std::string_view>::const_iterator end) {
  std::string body;
  for (auto it = begin; it != end; ++it) {
    if (it != begin) body.push_back('\n');
    body.append(*it);
  }
  return body;
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180)

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<CsvRecord> read_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  std::size_t line = 1;
  current.line = line;
  bool in_quotes = false;
  bool field_started = false;
  bool any_content = false;
  std::size_t quote_line = 0;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool empty_line = current.fields.size() == 1 && current.fields[0].empty() && !any_content;
    if (!empty_line) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
    any_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) {
          throw ParseError(ErrorCode::malformed,
                           "csv: stray quote on line " + std::to_string(line), line, 1);
        }
        in_quotes = true;
        field_started = true;
        any_content = true;
        quote_line = line;
        break;
      case ',':
        end_field();
        any_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
        any_content = true;
    }
  }
  if (in_quotes) {
    throw ParseError(ErrorCode::malformed,
                     "csv: unterminated quoted field starting on line " + std::to_string(quote_line),
                     quote_line, 1);
  }
  if (field_started || !current.fields.empty() || any_content) end_record();
  return records;
}

enum class Direction { sent, received, other };

Direction classify_direction(std::string_view raw) {
  const std::string d = lower(trim(raw));
  if (d == "sent" || d == "outbox" || d == "out" || d == "outgoing") return Direction::sent;
  if (d == "inbox" || d == "received" || d == "in" || d == "incoming") return Direction::received;
  return Direction::other;
}

/// Shared per-row handling for both export formats. Returns false (with a
/// warning) when the row is dropped.
bool accept_export_row(std::string_view direction, std::string_view peer, std::string_view time,
                       std::string body, const std::string& where, ParsedMessages& out) {
  switch (classify_direction(direction)) {
    case Direction::sent:
      break;
    case Direction::received:
      out.warnings.push_back(where + ": received message dropped (sent messages only)");
      return false;
    case Direction::other:
      out.warnings.push_back(where + ": unknown direction '" + std::string(trim(direction)) +
                             "', row dropped");
      return false;
  }
  if (blank(body)) {
    out.warnings.push_back(where + ": empty body, row dropped");
    return false;
  }
  RawMessage m;
  m.body_raw = std::move(body);
  if (!blank(peer)) m.receiver_raw = std::string(trim(peer));
  if (!blank(time)) {
    m.sent_at = parse_iso8601(time);
    if (!m.sent_at) {
      out.warnings.push_back(where + ": unparseable timestamp '" + std::string(trim(time)) +
                             "' ignored");
    }
  }
  out.messages.push_back(std::move(m));
  return true;
}

ParsedMessages parse_export_csv(std::string_view text) {
  const auto records = read_csv(text);
  if (records.empty()) throw ParseError(ErrorCode::no_schema, "csv: empty export");
  const auto& header = records.front().fields;
  std::string joined;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) joined.push_back(',');
    joined += lower(trim(header[i]));
  }
  if (joined != kCsvHeader) {
    throw ParseError(ErrorCode::no_schema,
                     "csv: expected header '" + std::string(kCsvHeader) + "'", 1, 1);
  }
  ParsedMessages out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "row " + std::to_string(r) + " (line " + std::to_string(rec.line) + ")";
    if (rec.fields.size() != 4) {
      out.warnings.push_back(where + ": expected 4 fields, got " +
                             std::to_string(rec.fields.size()) + ", row dropped");
      continue;
    }
    accept_export_row(rec.fields[0], rec.fields[1], rec.fields[2], rec.fields[3], where, out);
  }
  if (out.messages.empty()) throw ParseError(ErrorCode::zero_messages, "csv: no sent messages");
  return out;
}

ParsedMessages parse_export_xml(std::string_view text) {
  xml::Reader reader(text);
  xml::Event root = reader.next();
  while (root.kind == xml::Event::Kind::text) root = reader.next();
  if (root.kind != xml::Event::Kind::start_element || root.name != "messages") {
    throw ParseError(ErrorCode::no_schema, "xml export: expected <messages> root", root.line,
                     root.column);
  }
  ParsedMessages out;
  std::size_t index = 0;
  for (;;) {
    xml::Event e = reader.next();
    if (e.kind == xml::Event::Kind::end_element) break;  // </messages>
    if (e.kind == xml::Event::Kind::text) {
      if (!blank(e.text)) {
        throw ParseError(ErrorCode::malformed, "xml export: stray text inside <messages>", e.line,
                         e.column);
      }
      continue;
    }
    if (e.kind != xml::Event::Kind::start_element || e.name != "message") {
      throw ParseError(ErrorCode::malformed, "xml export: unexpected <" + e.name + ">", e.line,
                       e.column);
    }
    ++index;
    std::string body;
    for (;;) {
      xml::Event inner = reader.next();
      if (inner.kind == xml::Event::Kind::text) {
        body += inner.text;
      } else if (inner.kind == xml::Event::Kind::end_element) {
        break;
      } else {
        throw ParseError(ErrorCode::malformed, "xml export: nested element in <message>",
                         inner.line, inner.column);
      }
    }
    auto attr = [&](const char* name) -> std::string_view {
      const std::string* v = e.attribute(name);
      return v ? std::string_view(*v) : std::string_view{};
    };
    const std::string where =
        "message " + std::to_string(index) + " (line " + std::to_string(e.line) + ")";
    accept_export_row(attr("direction"), attr("peer"), attr("time"), std::move(body), where, out);
  }
  for (xml::Event tail = reader.next(); tail.kind != xml::Event::Kind::end_of_document;
       tail = reader.next()) {
  }
  if (out.messages.empty()) throw ParseError(ErrorCode::zero_messages, "xml export: no sent messages");
  return out;
}

std::string first_line(std::string_view bytes) {
  bytes = utf8::strip_bom(bytes);
  const std::size_t nl = bytes.find('\n');
  std::string_view line = bytes.substr(0, nl);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return std::string(line);
}

}  // namespace

TranscriptionRecord parse_transcription(std::string_view form_record,
                                        const TranscriptionBounds& bounds) {
  const auto lines = split_lines(checked_utf8(form_record));
  if (lines.empty() || trim(lines[0]) != kTranscriptionHeader) {
    throw ParseError(ErrorCode::malformed,
                     "transcription: expected '" + std::string(kTranscriptionHeader) + "'", 1, 1);
  }
  if (lines.size() < 3) {
    throw ParseError(ErrorCode::malformed, "transcription: truncated header");
  }
  TranscriptionRecord record;
  const auto lang = header_value(lines[1], "language");
  if (!lang) throw ParseError(ErrorCode::malformed, "transcription: expected 'language:'", 2, 1);
  const auto language = parse_enum<Language>(lower(*lang));
  if (!language || (*language != Language::english && *language != Language::chinese)) {
    throw ParseError(ErrorCode::malformed,
                     "transcription: language must be english or chinese", 2, 1);
  }
  record.declared_language = *language;
  const std::size_t declared = require_count(lines[2], 3);
  const std::size_t max =
      *language == Language::english ? bounds.english_max : bounds.chinese_max;
  if (declared < 1 || declared > max) {
    throw ParseError(ErrorCode::count_out_of_bounds,
                     "transcription: " + std::to_string(declared) + " messages outside 1.." +
                         std::to_string(max) + " for " + std::string(to_string(*language)),
                     3, 1);
  }
  const auto blocks = split_blocks(lines, 3);
  if (blocks.size() != declared) {
    throw ParseError(ErrorCode::count_out_of_bounds,
                     "transcription: declared " + std::to_string(declared) + " messages, found " +
                         std::to_string(blocks.size()));
  }
  for (const auto& block : blocks) {
    std::string body = join_body(block.lines.begin(), block.lines.end());
    if (blank(body)) {
      throw ParseError(ErrorCode::empty_slot,
                       "transcription: empty message slot at line " +
                           std::to_string(block.first_line),
                       block.first_line, 1);
    }
    record.messages.push_back(RawMessage{std::move(body), std::nullopt, std::nullopt, std::nullopt});
  }
  return record;
}

ParsedMessages parse_export(std::string_view bytes, std::optional<ExportFormat> format_hint) {
  const std::string_view text = checked_utf8(bytes);
  if (blank(text)) throw ParseError(ErrorCode::no_schema, "export: empty payload");
  ExportFormat format;
  if (format_hint) {
    format = *format_hint;
  } else {
    switch (detect_format(text)) {
      case InputFormat::export_csv: format = ExportFormat::csv; break;
      case InputFormat::export_xml: format = ExportFormat::xml; break;
      default: throw ParseError(ErrorCode::no_schema, "export: unrecognized archive format");
    }
  }
  return format == ExportFormat::csv ? parse_export_csv(text) : parse_export_xml(text);
}

UploadDraft parse_upload_draft(std::string_view text) {
  const auto lines = split_lines(checked_utf8(text));
  if (lines.empty() || lines[0] != kUploadHeader) {
    throw ParseError(ErrorCode::malformed,
                     "draft: expected header '" + std::string(kUploadHeader) + "'", 1, 1);
  }
  UploadDraft draft;
  const auto code = lines.size() > 1 ? header_value(lines[1], "code") : std::nullopt;
  if (!code || code->empty()) throw ParseError(ErrorCode::missing_code, "draft: missing code line", 2, 1);
  if (code->size() != 8 ||
      !std::all_of(code->begin(), code->end(), [](unsigned char c) { return std::isxdigit(c); })) {
    throw ParseError(ErrorCode::malformed, "draft: code must be 8 hex characters", 2, 1);
  }
  draft.verification_code = lower(*code);
  const auto device = lines.size() > 2 ? header_value(lines[2], "device") : std::nullopt;
  if (!device || device->empty()) throw ParseError(ErrorCode::malformed, "draft: missing device line", 3, 1);
  draft.device_id_token = std::string(*device);
  if (lines.size() < 4) throw ParseError(ErrorCode::malformed, "draft: missing count line", 4, 1);
  const std::size_t declared = require_count(lines[3], 4);

  const auto blocks = split_blocks(lines, 4);
  if (blocks.empty()) throw ParseError(ErrorCode::zero_messages, "draft: no messages");
  if (blocks.size() != declared) {
    throw ParseError(ErrorCode::malformed, "draft: declared " + std::to_string(declared) +
                                               " messages, found " + std::to_string(blocks.size()));
  }
  for (const auto& block : blocks) {
    const auto& bl = block.lines;
    const auto time = bl.size() > 0 ? header_value(bl[0], "time") : std::nullopt;
    const auto peer = bl.size() > 1 ? header_value(bl[1], "peer") : std::nullopt;
    if (!time || !peer) {
      throw ParseError(ErrorCode::malformed,
                       "draft: message at line " + std::to_string(block.first_line) +
                           " needs 'time:' and 'peer:' lines",
                       block.first_line, 1);
    }
    RawMessage m;
    if (*time != "-") m.sent_at = parse_iso8601(*time);
    if (*peer != "-" && !peer->empty()) m.receiver_raw = std::string(*peer);
    m.body_raw = join_body(bl.begin() + 2, bl.end());
    if (blank(m.body_raw)) {
      throw ParseError(ErrorCode::empty_slot,
                       "draft: empty message at line " + std::to_string(block.first_line),
                       block.first_line, 1);
    }
    draft.messages.push_back(std::move(m));
  }
  return draft;
}

std::string format_upload_draft(const UploadDraft& draft) {
  std::string out;
  out += kUploadHeader;
  out += "\ncode: " + draft.verification_code;
  out += "\ndevice: " + draft.device_id_token;
  out += "\ncount: " + std::to_string(draft.messages.size()) + "\n";
  for (const auto& m : draft.messages) {
    for (std::string_view line : split_lines(m.body_raw)) {
      if (line == kMessageDelimiter) {
        throw CorpusError(ErrorCode::invalid_argument, "message body contains a delimiter line");
      }
    }
    out += kMessageDelimiter;
    out += "\ntime: " + (m.sent_at ? format_iso8601(*m.sent_at) : std::string("-"));
    out += "\npeer: " + m.receiver_raw.value_or("-");
    out += "\n" + m.body_raw + "\n";
  }
  return out;
}

std::string upload_verification_code(std::string_view device_id_token, std::size_t message_count,
                                     std::span<const std::uint8_t> secret) {
  std::string message = "upload\x1f";
  message += device_id_token;
  message += '\x1f';
  message += std::to_string(message_count);
  const auto tag = crypto::hmac_sha256(secret, message);
  return crypto::to_hex(tag).substr(0, 8);
}

bool verify_upload(const UploadDraft& draft, std::span<const std::uint8_t> secret) noexcept {
  try {
    const std::string expected =
        upload_verification_code(draft.device_id_token, draft.messages.size(), secret);
    return crypto::constant_time_equal(lower(draft.verification_code), expected);
  } catch (...) {
    return false;
  }
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::transcription: return "transcription";
    case InputFormat::export_csv: return "export_csv";
    case InputFormat::export_xml: return "export_xml";
    case InputFormat::upload_draft: return "upload_draft";
    case InputFormat::unknown: return "unknown";
  }
  return "unknown";
}

InputFormat detect_format(std::string_view bytes) noexcept {
  try {
    const std::string line = first_line(bytes);
    const std::string_view t = trim(line);
    if (t == kUploadHeader) return InputFormat::upload_draft;
    if (t == kTranscriptionHeader) return InputFormat::transcription;
    if (t.substr(0, 5) == "<?xml" || t.substr(0, 9) == "<messages") return InputFormat::export_xml;
    std::string compact;
    for (char c : lower(t)) {
      if (c != ' ' && c != '\t') compact.push_back(c);
    }
    if (compact == kCsvHeader) return InputFormat::export_csv;
  } catch (...) {
  }
  return InputFormat::unknown;
}

}  // namespace smscorpus
