#include "smscorpus/xml.hpp"

#include <cstdlib>

#include "smscorpus/error.hpp"
#include "smscorpus/utf8.hpp"

namespace smscorpus::xml {

const std::string* Event::attribute(std::string_view attr_name) const {
  for (const auto& a : attributes) {
    if (a.name == attr_name) return &a.value;
  }
  return nullptr;
}

namespace {

bool is_name_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

Reader::Reader(std::string_view document) : doc_(utf8::strip_bom(document)) {}

void Reader::fail(const std::string& what) const {
  throw ParseError(ErrorCode::malformed,
                   "xml: " + what + " at line " + std::to_string(line_) + ", column " +
                       std::to_string(column_),
                   line_, column_);
}

bool Reader::starts_with(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

void Reader::advance(std::size_t n) {
  for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i, ++pos_) {
    if (doc_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(doc_[pos_]) & 0xC0) != 0x80) {
      ++column_;
    }
  }
}

void Reader::skip_space() {
  while (pos_ < doc_.size() && is_space(doc_[pos_])) advance(1);
}

std::string Reader::read_name() {
  if (pos_ >= doc_.size() || !is_name_start(doc_[pos_])) fail("expected a name");
  const std::size_t start = pos_;
  while (pos_ < doc_.size() && is_name_char(doc_[pos_])) advance(1);
  return std::string(doc_.substr(start, pos_ - start));
}

std::string Reader::decode_entities(std::string_view raw, std::size_t line,
                                    std::size_t column) const {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '<') {
      throw ParseError(ErrorCode::malformed,
                       "xml: '<' in attribute value at line " + std::to_string(line), line,
                       column);
    }
    if (c != '&') {
      out.push_back(c);
      continue;
    }
    const std::size_t semi = raw.find(';', i);
    if (semi == std::string_view::npos || semi - i > 12) {
      throw ParseError(ErrorCode::malformed,
                       "xml: unterminated entity reference at line " + std::to_string(line),
                       line, column);
    }
    const std::string_view ent = raw.substr(i + 1, semi - i - 1);
    if (ent == "lt") {
      out.push_back('<');
    } else if (ent == "gt") {
      out.push_back('>');
    } else if (ent == "amp") {
      out.push_back('&');
    } else if (ent == "quot") {
      out.push_back('"');
    } else if (ent == "apos") {
      out.push_back('\'');
    } else if (ent.size() >= 2 && ent[0] == '#') {
      const bool hex = ent[1] == 'x';
      const std::string digits(ent.substr(hex ? 2 : 1));
      char* end = nullptr;
      const unsigned long cp = digits.empty() ? 0 : std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      const bool valid = !digits.empty() && end != nullptr && *end == '\0' &&
                         (cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
                          (cp >= 0xE000 && cp <= 0xFFFD) || (cp >= 0x10000 && cp <= 0x10FFFF));
      if (!valid) {
        throw ParseError(ErrorCode::malformed,
                         "xml: invalid character reference &" + std::string(ent) +
                             "; at line " + std::to_string(line),
                         line, column);
      }
      utf8::append(out, static_cast<char32_t>(cp));
    } else {
      throw ParseError(ErrorCode::malformed,
                       "xml: unknown entity &" + std::string(ent) + "; at line " +
                           std::to_string(line),
                       line, column);
    }
    i = semi;
  }
  return out;
}

Event Reader::next() {
  if (pending_end_) {
    Event e = std::move(*pending_end_);
    pending_end_.reset();
    open_.pop_back();
    return e;
  }

  for (;;) {
    if (pos_ >= doc_.size()) {
      if (!open_.empty()) fail("unexpected end of document inside <" + open_.back() + ">");
      if (!seen_root_) fail("document has no root element");
      Event e;
      e.kind = Event::Kind::end_of_document;
      e.line = line_;
      e.column = column_;
      return e;
    }

    const std::size_t line = line_;
    const std::size_t column = column_;

    if (doc_[pos_] != '<') {
      const std::size_t start = pos_;
      const std::size_t lt = doc_.find('<', pos_);
      const std::size_t stop = lt == std::string_view::npos ? doc_.size() : lt;
      advance(stop - start);
      const std::string_view raw = doc_.substr(start, stop - start);
      if (open_.empty()) {
        for (char c : raw) {
          if (!is_space(c)) fail("character data outside the root element");
        }
        continue;
      }
      if (raw.find("]]>") != std::string_view::npos) {
        fail("']]>' in character data");
      }
      std::string text;
      text.reserve(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '&') {
          const std::size_t semi = raw.find(';', i);
          if (semi == std::string_view::npos) fail("unterminated entity reference");
          text += decode_entities(raw.substr(i, semi - i + 1), line, column);
          i = semi;
        } else {
          text.push_back(raw[i]);
        }
      }
      Event e;
      e.kind = Event::Kind::text;
      e.text = std::move(text);
      e.line = line;
      e.column = column;
      return e;
    }

    if (starts_with("<?")) {
      const std::size_t end = doc_.find("?>", pos_);
      if (end == std::string_view::npos) fail("unterminated processing instruction");
      advance(end + 2 - pos_);
      continue;
    }
    if (starts_with("<!--")) {
      const std::size_t end = doc_.find("-->", pos_ + 4);
      if (end == std::string_view::npos) fail("unterminated comment");
      advance(end + 3 - pos_);
      continue;
    }
    if (starts_with("<![CDATA[")) {
      if (open_.empty()) fail("CDATA outside the root element");
      const std::size_t end = doc_.find("]]>", pos_ + 9);
      if (end == std::string_view::npos) fail("unterminated CDATA section");
      Event e;
      e.kind = Event::Kind::text;
      e.text = std::string(doc_.substr(pos_ + 9, end - pos_ - 9));
      e.line = line;
      e.column = column;
      advance(end + 3 - pos_);
      return e;
    }
    if (starts_with("<!")) fail("DTDs are not supported");

    if (starts_with("</")) {
      advance(2);
      std::string name = read_name();
      skip_space();
      if (pos_ >= doc_.size() || doc_[pos_] != '>') fail("expected '>' closing </" + name);
      advance(1);
      if (open_.empty() || open_.back() != name) {
        fail("mismatched closing tag </" + name + ">");
      }
      open_.pop_back();
      Event e;
      e.kind = Event::Kind::end_element;
      e.name = std::move(name);
      e.line = line;
      e.column = column;
      return e;
    }

    advance(1);
    if (open_.empty() && seen_root_) fail("more than one root element");
    Event e;
    e.kind = Event::Kind::start_element;
    e.line = line;
    e.column = column;
    e.name = read_name();
    for (;;) {
      const bool had_space = pos_ < doc_.size() && is_space(doc_[pos_]);
      skip_space();
      if (pos_ >= doc_.size()) fail("unterminated start tag <" + e.name);
      if (doc_[pos_] == '>') {
        advance(1);
        break;
      }
      if (starts_with("/>")) {
        advance(2);
        Event end;
        end.kind = Event::Kind::end_element;
        end.name = e.name;
        end.line = line_;
        end.column = column_;
        pending_end_ = std::move(end);
        break;
      }
      if (!had_space) fail("expected whitespace before attribute");
      const std::size_t attr_line = line_;
      const std::size_t attr_column = column_;
      Attribute attr;
      attr.name = read_name();
      skip_space();
      if (pos_ >= doc_.size() || doc_[pos_] != '=') fail("expected '=' after " + attr.name);
      advance(1);
      skip_space();
      if (pos_ >= doc_.size() || (doc_[pos_] != '"' && doc_[pos_] != '\'')) {
        fail("expected quoted value for " + attr.name);
      }
      const char quote = doc_[pos_];
      advance(1);
      const std::size_t close = doc_.find(quote, pos_);
      if (close == std::string_view::npos) fail("unterminated attribute value");
      const std::string_view raw = doc_.substr(pos_, close - pos_);
      advance(close + 1 - pos_);
      // Literal whitespace in attribute values normalizes to a space.
      std::string spaced(raw);
      for (char& ch : spaced) {
        if (ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
      }
      attr.value = decode_entities(spaced, attr_line, attr_column);
      for (const auto& existing : e.attributes) {
        if (existing.name == attr.name) fail("duplicate attribute " + attr.name);
      }
      e.attributes.push_back(std::move(attr));
    }
    seen_root_ = true;
    open_.push_back(e.name);
    return e;
  }
}

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string escape_attribute(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace smscorpus::xml
