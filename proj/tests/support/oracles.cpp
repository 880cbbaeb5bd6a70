#include "oracles.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace oracle {

namespace {

const std::regex& email_re() {
  static const std::regex re(R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,})");
  return re;
}

const std::regex& url_re() {
  static const std::regex re(
      R"(((https?|ftp)://|www\.)[A-Za-z0-9\-._~:/?#\[\]@!$&()*+,;=%]*[A-Za-z0-9/_~#=&%+\-*$@])",
      std::regex::icase);
  return re;
}

const std::regex& digits_re() {
  static const std::regex re(R"([0-9]{2,}|[0-9]\.[0-9])");
  return re;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::string digits(std::mt19937_64& rng, int lo, int hi) {
  const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng() % 10));
  return s;
}

std::string letters(std::mt19937_64& rng, int lo, int hi) {
  const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng() % 26));
  return s;
}

std::string exemplar(std::mt19937_64& rng) {
  switch (rng() % 16) {
    case 0: return "name@gmail.com";
    case 1: return letters(rng, 1, 8) + "." + letters(rng, 1, 5) + "@" + letters(rng, 2, 7) + ".com.sg";
    case 2: return "http://www.google.com";
    case 3: return pick<std::string>(rng, {"https://", "www.", "HTTP://", "ftp://"}) + letters(rng, 2, 8) +
                   ".org/" + letters(rng, 0, 6) + "?q=" + digits(rng, 1, 4);
    case 4: return "127.0.0.1";
    case 5: return digits(rng, 1, 3) + "." + digits(rng, 1, 3) + "." + digits(rng, 1, 3) + "." + digits(rng, 1, 3);
    case 6: return "12:30";
    case 7: return digits(rng, 1, 2) + ":" + digits(rng, 2, 2) + pick<std::string>(rng, {"", "pm", " AM", "am"});
    case 8: return "19/01/2011";
    case 9: return digits(rng, 1, 2) + "/" + digits(rng, 1, 2) + "/" + digits(rng, 2, 2);
    case 10: return digits(rng, 4, 4) + "-" + digits(rng, 1, 2) + "-" + digits(rng, 1, 2);
    case 11: return rng() % 2 ? "21.3" : digits(rng, 1, 4) + "." + digits(rng, 1, 3);
    case 12: return rng() % 2 ? "4000" : digits(rng, 2, 12);
    case 13: return rng() % 2 ? "12-4234-212" : digits(rng, 1, 4) + "-" + digits(rng, 2, 4) + "-" + digits(rng, 1, 4);
    case 14: return rng() % 2 ? "U2003322X" : letters(rng, 0, 2) + digits(rng, 2, 8) + letters(rng, 1, 2);
    default: return "+65 " + digits(rng, 4, 4) + " " + digits(rng, 4, 4);
  }
}

std::string filler(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "ok",  "see you", "lol", "tmr", "meet at", "the", "wanna", "dinner", "你好", "我们",
      "明天", "吃饭", ":-)", ":)", ";-)", ":P", "!", "?", ",", ".", "...", "-", "/", ":",
      "@", "#", "(", ")", "&", "<", ">", "\"", "'", "1", "7", "a1", "x", "\t", "\n"};
  switch (rng() % 4) {
    case 0: return digits(rng, 1, 1);
    case 1: return letters(rng, 1, 6);
    default: return pick(rng, pieces);
  }
}

std::string separator(std::mt19937_64& rng) {
  static const std::vector<std::string> seps = {" ", " ", " ", "", ",", ", ", "\n", " (", ") ", "-"};
  return pick(rng, seps);
}

}  // namespace

bool has_residual(std::string_view text) {
  const std::string s(text);
  return std::regex_search(s, email_re()) || std::regex_search(s, url_re()) ||
         std::regex_search(s, digits_re());
}

bool looks_like_phone(std::string_view text) {
  static const std::regex re(R"(^\+?[0-9]{5,15}$)");
  std::string compact;
  for (char c : text) {
    if (c != ' ' && c != '-' && c != '.' && c != '(' && c != ')') compact.push_back(c);
  }
  return std::regex_match(compact, re);
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  for (std::size_t i = 0; i < text.size();) {
    const auto b = static_cast<unsigned char>(text[i]);
    int len = b < 0x80 ? 1 : (b >> 5) == 6 ? 2 : (b >> 4) == 14 ? 3 : (b >> 3) == 30 ? 4 : 1;
    if (i + len > text.size()) len = 1;
    char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

double jaccard(std::string_view a, std::string_view b) {
  auto grams = [](std::string_view t) {
    std::u32string folded;
    bool pending_space = false;
    for (char32_t c : decode_utf8(t)) {
      if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') {
        pending_space = !folded.empty();
        continue;
      }
      if (pending_space) folded.push_back(U' ');
      pending_space = false;
      folded.push_back(c >= U'A' && c <= U'Z' ? c + 32 : c);
    }
    std::vector<std::u32string> out;
    if (folded.empty()) return out;
    if (folded.size() < 3) {
      out.push_back(folded);
      return out;
    }
    for (std::size_t i = 0; i + 3 <= folded.size(); ++i) out.push_back(folded.substr(i, 3));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  const auto ga = grams(a);
  const auto gb = grams(b);
  if (ga.empty() && gb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : ga) {
    for (const auto& y : gb) {
      if (x == y) {
        ++inter;
        break;
      }
    }
  }
  const std::size_t uni = ga.size() + gb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string fuzz_text(std::mt19937_64& rng) {
  const int parts = std::uniform_int_distribution<int>(1, 12)(rng);
  std::string out;
  for (int i = 0; i < parts; ++i) {
    if (i) out += separator(rng);
    out += rng() % 3 == 0 ? filler(rng) : exemplar(rng);
  }
  return out;
}

std::vector<std::string> synthetic_numbers(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string digits_only = digits(rng, 8, 11);
    if (!seen.insert(digits_only).second) continue;
    switch (rng() % 4) {
      case 0: out.push_back("+65" + digits_only); break;
      case 1: out.push_back(digits_only); break;
      case 2: out.push_back("+86 " + digits_only.substr(0, 3) + "-" + digits_only.substr(3)); break;
      default: out.push_back("(" + digits_only.substr(0, 3) + ") " + digits_only.substr(3)); break;
    }
  }
  return out;
}

}  // namespace oracle
