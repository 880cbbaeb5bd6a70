#pragma once

#include <random>
#include <string>

namespace bench {

/// Chatty message text with the odd number, address and emoticon.
inline std::string message(std::mt19937_64& rng) {
  static const char* words[] = {"ok",    "lah",   "see",  "you",    "later", "at",   "the",
                                "canteen", "meet", "can",  "call",   "me",    "tmr",  "haha",
                                "wait",  "for",   "bus",  "我们",   "明天",  "见",   ":)"};
  static const char* spans[] = {"9123 4567", "ring 555-0100", "mail a.tan@nus.edu.sg",
                                "see www.example.com/x", "at 10.30pm", "room 12", "$5"};
  std::string out;
  const std::size_t n = 3 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty()) out += ' ';
    out += rng() % 8 == 0 ? spans[rng() % 7] : words[rng() % 21];
  }
  return out;
}

}  // namespace bench
