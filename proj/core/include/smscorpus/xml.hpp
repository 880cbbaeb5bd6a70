#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smscorpus::xml {

struct Attribute {
  std::string name;
  std::string value;
};

struct Event {
  enum class Kind { start_element, end_element, text, end_of_document };

  Kind kind = Kind::end_of_document;
  std::string name;
  std::vector<Attribute> attributes;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;

  const std::string* attribute(std::string_view attr_name) const;
};

/// Small pull reader for the flat documents this project reads and writes:
/// elements, attributes, character data, CDATA, comments, processing
/// instructions and the five predefined entities plus numeric references.
/// DTDs are rejected. Errors throw ParseError(malformed) with a position.
class Reader {
 public:
  explicit Reader(std::string_view document);

  Event next();

 private:
  [[noreturn]] void fail(const std::string& what) const;
  bool starts_with(std::string_view s) const;
  void advance(std::size_t n);
  std::string read_name();
  std::string decode_entities(std::string_view raw, std::size_t line,
                              std::size_t column) const;
  void skip_space();

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  std::vector<std::string> open_;
  std::optional<Event> pending_end_;
  bool seen_root_ = false;
};

std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view text);

}  // namespace smscorpus::xml
