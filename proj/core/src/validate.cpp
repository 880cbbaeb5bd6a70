#include "smscorpus/validate.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <unordered_map>

#include "smscorpus/anonymize.hpp"
#include "smscorpus/config.hpp"
#include "smscorpus/error.hpp"
#include "smscorpus/store.hpp"
#include "smscorpus/utf8.hpp"

namespace smscorpus {

namespace {

constexpr std::array<std::string_view, 7> kPlaceholders = {
    kEmailCode, kUrlCode, kIpCode, kDateCode, kTimeCode, kDecimalCode, kNumberCode};

std::string format_fraction(std::size_t k, std::size_t n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu of %zu", k, n);
  return buf;
}

std::string join_ids(const std::vector<std::string>& ids, std::size_t max = 10) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < max; ++i) {
    if (i) out += ",";
    out += ids[i];
  }
  if (ids.size() > max) out += ",...";
  return out;
}

}  // namespace

Language detect_language(std::string_view text) {
  std::size_t cjk = 0;
  std::size_t latin = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '<') {
      bool skipped = false;
      for (const auto code : kPlaceholders) {
        if (text.substr(i, code.size()) == code) {
          i += code.size();
          skipped = true;
          break;
        }
      }
      if (skipped) continue;
    }
    const std::size_t start = i;
    ++i;
    while (i < text.size() && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) ++i;
    const auto cps = utf8::decode(text.substr(start, i - start));
    for (char32_t cp : cps) {
      if (utf8::is_cjk(cp)) {
        ++cjk;
      } else if (utf8::is_latin_letter(cp)) {
        ++latin;
      }
    }
  }
  if (cjk + latin == 0) return Language::unknown;
  // Compare r = cjk / (cjk + latin) against 0.7 and 0.1 in integers.
  const std::size_t total = cjk + latin;
  if (cjk * 10 >= total * 7) return Language::chinese;
  if (cjk * 10 <= total) return Language::english;
  return Language::mixed;
}

std::string normalize_for_match(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        pending_space = true;
        ++i;
        continue;
      }
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && (static_cast<unsigned char>(text[j]) & 0xC0) == 0x80) ++j;
    const auto cps = utf8::decode(text.substr(i, j - i));
    if (cps.size() == 1 && utf8::is_space(cps[0])) {
      pending_space = true;
    } else {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.append(text.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

namespace {

std::set<std::u32string> grams_of_normalized(std::string_view normalized) {
  const auto cps = utf8::decode(normalized);
  std::set<std::u32string> out;
  if (cps.empty()) return out;
  if (cps.size() < 3) {
    out.emplace(cps.begin(), cps.end());
    return out;
  }
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) out.emplace(&cps[i], 3);
  return out;
}

}  // namespace

std::set<std::u32string> shingles(std::string_view text) {
  return grams_of_normalized(normalize_for_match(text));
}

double jaccard(const std::set<std::u32string>& a, const std::set<std::u32string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double similarity(std::string_view a, std::string_view b) { return jaccard(shingles(a), shingles(b)); }

void DuplicateIndex::add(Reference reference) {
  Entry e;
  e.normalized = normalize_for_match(reference.text);
  e.grams = grams_of_normalized(e.normalized);
  e.ref = std::move(reference);
  const std::size_t index = entries_.size();
  by_normalized_.emplace(e.normalized, index);
  for (const auto& g : e.grams) by_gram_[g].push_back(index);
  entries_.push_back(std::move(e));
}

std::vector<DuplicateMatch> DuplicateIndex::exact(std::string_view text) const {
  std::vector<DuplicateMatch> out;
  const auto [lo, hi] = by_normalized_.equal_range(normalize_for_match(text));
  for (auto it = lo; it != hi; ++it) {
    const auto& ref = entries_[it->second].ref;
    out.push_back({ref.id, ref.kind, 1.0});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.reference_id < b.reference_id; });
  return out;
}

std::vector<DuplicateMatch> DuplicateIndex::near(std::string_view text, double theta) const {
  const auto grams = shingles(text);
  std::vector<DuplicateMatch> out;
  if (grams.empty()) {
    for (const auto& e : entries_) {
      if (e.grams.empty()) out.push_back({e.ref.id, e.ref.kind, 1.0});
    }
  } else {
    std::unordered_map<std::size_t, std::size_t> shared;
    for (const auto& g : grams) {
      const auto it = by_gram_.find(g);
      if (it == by_gram_.end()) continue;
      for (std::size_t idx : it->second) ++shared[idx];
    }
    for (const auto& [idx, inter] : shared) {
      const auto& e = entries_[idx];
      const double score = static_cast<double>(inter) /
                           static_cast<double>(grams.size() + e.grams.size() - inter);
      if (score >= theta) out.push_back({e.ref.id, e.ref.kind, score});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.reference_id < b.reference_id;
  });
  return out;
}

std::vector<Reference> parse_blocklist(std::string_view text) {
  std::vector<Reference> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::string body = scrub_body(normalize_emoticons(utf8::sanitize(line)));
    out.push_back({"blocklist:" + std::to_string(line_no), body, ReferenceKind::blocklist});
  }
  return out;
}

std::vector<Reference> load_blocklist(const std::filesystem::path& path) {
  return parse_blocklist(read_file(path));
}

ExactDuplicates find_exact_duplicates(const std::vector<Message>& batch_messages,
                                      const DuplicateIndex& references) {
  ExactDuplicates out;
  std::unordered_map<std::string, std::string> first_in_batch;
  for (const auto& m : batch_messages) {
    const std::string norm = normalize_for_match(m.body);
    for (const auto& match : references.exact(m.body)) {
      auto& bucket = match.kind == ReferenceKind::blocklist ? out.blocklist_hits : out.corpus_hits;
      bucket.emplace_back(m.id, match.reference_id);
    }
    const auto [it, inserted] = first_in_batch.emplace(norm, m.id);
    if (!inserted) out.corpus_hits.emplace_back(m.id, it->second);
  }
  return out;
}

std::vector<DuplicateMatch> find_near_duplicates(std::string_view text,
                                                 const DuplicateIndex& references, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw CorpusError(ErrorCode::invalid_argument, "theta must lie in (0, 1]");
  }
  return references.near(text, theta);
}

ModerationPolicy ModerationPolicy::parse(std::string_view text) {
  ModerationPolicy p;
  auto number = [](const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || v < 0.0 || v > 1.0) {
      throw CorpusError(ErrorCode::invalid_argument,
                        "policy " + key + " must be a number in [0, 1], got '" + value + "'");
    }
    return v;
  };
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "blocklist_reject_frac") {
      p.blocklist_reject_frac = number(key, value);
    } else if (key == "neardup_review_frac") {
      p.neardup_review_frac = number(key, value);
    } else if (key == "neardup_theta") {
      p.neardup_theta = number(key, value);
      if (p.neardup_theta <= 0.0) {
        throw CorpusError(ErrorCode::invalid_argument, "policy neardup_theta must be positive");
      }
    } else if (key == "require_profile") {
      if (value == "true") {
        p.require_profile = true;
      } else if (value == "false") {
        p.require_profile = false;
      } else {
        throw CorpusError(ErrorCode::invalid_argument, "policy require_profile must be true|false");
      }
    } else {
      throw CorpusError(ErrorCode::invalid_argument, "unknown policy key " + key);
    }
  }
  return p;
}

ModerationPolicy ModerationPolicy::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

std::string_view to_string(Recommendation r) {
  switch (r) {
    case Recommendation::approve: return "approve";
    case Recommendation::reject: return "reject";
    case Recommendation::review: return "review";
  }
  return "?";
}

QualityReport quality_report(std::string_view batch_id, const std::vector<Message>& batch_messages,
                             const DuplicateIndex& references, const ModerationPolicy& policy) {
  QualityReport r;
  r.batch_id = std::string(batch_id);
  r.message_count = batch_messages.size();
  for (Language l : enum_values<Language>()) r.language_counts[l] = 0;

  std::vector<std::string> blocklist_ids;
  std::vector<std::string> dup_ids;
  DuplicateIndex earlier;  // messages seen so far in this batch
  for (const auto& m : batch_messages) {
    ++r.language_counts[detect_language(m.body)];
    const auto exact = references.exact(m.body);
    const auto near = references.near(m.body, policy.neardup_theta);
    auto has_kind = [](const std::vector<DuplicateMatch>& v, ReferenceKind k) {
      return std::any_of(v.begin(), v.end(), [k](const auto& d) { return d.kind == k; });
    };
    if (has_kind(exact, ReferenceKind::blocklist) || has_kind(near, ReferenceKind::blocklist)) {
      ++r.blocklist_hit_count;
      blocklist_ids.push_back(m.id);
    } else if (has_kind(exact, ReferenceKind::corpus) || !earlier.exact(m.body).empty()) {
      ++r.exact_dup_count;
      dup_ids.push_back(m.id);
    } else if (has_kind(near, ReferenceKind::corpus) ||
               !earlier.near(m.body, policy.neardup_theta).empty()) {
      ++r.near_dup_count;
      dup_ids.push_back(m.id);
    }
    earlier.add({m.id, m.body, ReferenceKind::corpus});
  }

  const double n = static_cast<double>(r.message_count);
  if (r.message_count == 0) {
    r.recommendation = Recommendation::review;
    r.reasons.push_back("batch has no messages");
    return r;
  }
  if (static_cast<double>(r.blocklist_hit_count) / n > policy.blocklist_reject_frac) {
    r.recommendation = Recommendation::reject;
    r.reasons.push_back("blocklist: " + format_fraction(r.blocklist_hit_count, r.message_count) +
                        " messages match known public SMS (" + join_ids(blocklist_ids) + ")");
    return r;
  }
  const std::size_t dups = r.exact_dup_count + r.near_dup_count;
  if (dups > 0 && static_cast<double>(dups) / n >= policy.neardup_review_frac) {
    r.recommendation = Recommendation::review;
    r.reasons.push_back("duplicates: " + format_fraction(dups, r.message_count) +
                        " messages repeat existing text (" + join_ids(dup_ids) + ")");
  }
  if (r.language_counts[Language::unknown] * 2 > r.message_count) {
    r.recommendation = Recommendation::review;
    r.reasons.push_back("language: " +
                        format_fraction(r.language_counts[Language::unknown], r.message_count) +
                        " messages contain no letters");
  }
  return r;
}

DuplicateIndex reference_index(const CorpusSnapshot& corpus, std::string_view batch_id,
                               const std::vector<Reference>& blocklist) {
  DuplicateIndex index;
  for (const auto& m : corpus.messages) {
    if (m.batch_id == batch_id || m.status == Status::rejected) continue;
    index.add({m.id, m.body, ReferenceKind::corpus});
  }
  for (const auto& b : blocklist) index.add(b);
  return index;
}

ModerationOutcome moderate(Store& store, std::string_view batch_id, Decision decision,
                           std::optional<std::string> reason, const RewardScheme* scheme,
                           const ModerationPolicy& policy) {
  const auto batch = store.get_batch(batch_id);
  if (!batch) throw CorpusError(ErrorCode::not_found, "batch not found: " + std::string(batch_id));
  if (batch->status != Status::pending) {
    throw CorpusError(ErrorCode::conflict, "batch " + batch->id + " is already " +
                                               std::string(to_string(batch->status)));
  }
  ModerationOutcome out;
  if (decision == Decision::reject) {
    if (!reason || reason->empty()) reason = "rejected";
    out.batch = store.finalize_batch(batch_id, Status::rejected, reason, std::nullopt);
    return out;
  }
  if (policy.require_profile) {
    const auto messages = store.batch_messages(batch_id);
    const bool has_profile = std::any_of(messages.begin(), messages.end(), [&](const Message& m) {
      return m.profile_id && store.get_profile(*m.profile_id);
    });
    if (!has_profile) {
      throw CorpusError(ErrorCode::missing_profile,
                        "batch " + batch->id + " has no demographic profile");
    }
  }
  RewardResult reward;
  if (scheme) {
    reward = compute_reward(*scheme, static_cast<std::int64_t>(batch->message_ids.size()));
  }
  out.batch = store.finalize_batch(batch_id, Status::approved, reason, reward.amount);
  out.reward = reward;
  return out;
}

double ApprovalCell::rate() const {
  const std::size_t decided = approved + rejected;
  return decided == 0 ? 0.0 : static_cast<double>(approved) / static_cast<double>(decided);
}

std::optional<double> ApprovalTable::rate(CollectionMethod method, Source source) const {
  const auto it = cells.find({method, source});
  if (it == cells.end()) return std::nullopt;
  return it->second.rate();
}

std::optional<double> ApprovalTable::overall() const {
  ApprovalCell total;
  for (const auto& [key, cell] : cells) {
    total.approved += cell.approved;
    total.rejected += cell.rejected;
  }
  if (total.approved + total.rejected == 0) return std::nullopt;
  return total.rate();
}

ApprovalTable approval_rates(const std::vector<SubmissionBatch>& batches) {
  ApprovalTable t;
  for (const auto& b : batches) {
    if (b.status == Status::pending) continue;
    auto& cell = t.cells[{b.collection_method, b.source}];
    if (b.status == Status::approved) {
      ++cell.approved;
    } else {
      ++cell.rejected;
    }
  }
  return t;
}

}  // namespace smscorpus
