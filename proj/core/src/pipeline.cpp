#include "smscorpus/pipeline.hpp"

#include <cstdio>

#include <json.hpp>

#include "smscorpus/crypto.hpp"
#include "smscorpus/error.hpp"

namespace smscorpus {

namespace {

CollectionMethod method_of(InputFormat format) {
  switch (format) {
    case InputFormat::transcription: return CollectionMethod::transcription;
    case InputFormat::upload_draft: return CollectionMethod::upload;
    default: return CollectionMethod::export_archive;
  }
}

std::string contributor_token(std::string_view contributor, const PseudonymKey& key) {
  const auto tag = crypto::hmac_sha256(key.key_bytes, "contributor\x1f" + std::string(contributor));
  return "C" + crypto::to_hex(std::span<const std::uint8_t>(tag.data(), 8));
}

std::string message_id(const std::string& batch_id, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%04zu", index);
  return batch_id + buf;
}

}  // namespace

SubmissionResult submit(Store& store, const Toolkit& toolkit, const Submission& submission,
                        Timestamp received_at) {
  SubmissionResult result;
  result.format = detect_format(submission.payload);
  if (result.format == InputFormat::unknown) {
    throw ParseError(ErrorCode::no_schema, "detect_format=unknown: payload matches no channel format");
  }
  const CollectionMethod method = method_of(result.format);
  if (submission.declared_method && *submission.declared_method != method) {
    throw CorpusError(ErrorCode::invalid_argument,
                      "declared method " + std::string(to_string(*submission.declared_method)) +
                          " does not match detected format " +
                          std::string(to_string(result.format)));
  }

  std::vector<RawMessage> raw;
  std::string contributor = submission.contributor.value_or("");
  switch (result.format) {
    case InputFormat::transcription: {
      auto record = parse_transcription(submission.payload, toolkit.bounds);
      raw = std::move(record.messages);
      break;
    }
    case InputFormat::export_csv:
    case InputFormat::export_xml: {
      auto parsed = parse_export(submission.payload, result.format == InputFormat::export_csv
                                                         ? ExportFormat::csv
                                                         : ExportFormat::xml);
      raw = std::move(parsed.messages);
      result.warnings = std::move(parsed.warnings);
      break;
    }
    case InputFormat::upload_draft: {
      auto draft = parse_upload_draft(submission.payload);
      if (!verify_upload(draft, toolkit.secrets.upload_secret)) {
        throw CorpusError(ErrorCode::unauthorized, "upload verification code does not match");
      }
      if (contributor.empty()) contributor = "device:" + draft.device_id_token;
      raw = std::move(draft.messages);
      break;
    }
    case InputFormat::unknown:
      break;
  }

  SubmissionBatch batch;
  batch.id = store.allocate_batch_id();
  batch.contributor_ref = contributor.empty()
                              ? "anonymous:" + batch.id
                              : contributor_token(contributor, toolkit.secrets.pseudonym_key);
  batch.collection_method = method;
  batch.source = submission.source;
  batch.received_at = received_at;
  batch.attested_personal = submission.attested_personal;

  std::optional<UserProfile> profile = submission.profile;
  if (profile) {
    profile->id = "U" + batch.id.substr(1);
    result.profile_id = profile->id;
  }

  std::vector<Message> messages;
  messages.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Message m = anonymize_message(raw[i], toolkit.secrets.pseudonym_key, toolkit.emoticons);
    m.id = message_id(batch.id, i + 1);
    m.language = detect_language(m.body);
    m.collection_method = method;
    m.source = submission.source;
    m.batch_id = batch.id;
    m.profile_id = result.profile_id;
    messages.push_back(std::move(m));
  }

  result.batch_id = batch.id;
  result.message_ids = store.put_batch(batch, messages, profile);
  const auto index = reference_index(store.snapshot(false), batch.id, toolkit.blocklist);
  result.report = quality_report(batch.id, messages, index, toolkit.policy);
  return result;
}

QualityReport report_for_batch(const Store& store, const Toolkit& toolkit,
                               std::string_view batch_id) {
  if (!store.get_batch(batch_id)) {
    throw CorpusError(ErrorCode::not_found, "batch not found: " + std::string(batch_id));
  }
  const auto messages = store.batch_messages(batch_id);
  const auto index = reference_index(store.snapshot(false), batch_id, toolkit.blocklist);
  return quality_report(batch_id, messages, index, toolkit.policy);
}

ReleaseBundle publish_release(Store& store, std::string_view version_id, Timestamp created_at) {
  const auto snapshot = store.snapshot(true);
  ReleaseBundle bundle = build_release(snapshot, version_id, store.latest_version(), created_at);
  std::vector<StoredArtifact> stored;
  for (const auto& a : bundle.artifacts) stored.push_back({a.name, a.bytes, a.digest});
  stored.push_back({manifest_name(version_id), bundle.manifest, crypto::sha256_hex(bundle.manifest)});
  store.put_version(bundle.version, stored);
  return bundle;
}

VerifyReport verify_stored_release(const Store& store, std::string_view version_id) {
  const auto manifest = store.artifact(version_id, manifest_name(version_id));
  if (!manifest) {
    throw CorpusError(ErrorCode::not_found, "release not found: " + std::string(version_id));
  }
  std::map<std::string, std::string> files;
  for (const auto& name :
       {xml_dump_name(version_id), sql_dump_name(version_id), stats_report_name(version_id)}) {
    if (auto a = store.artifact(version_id, name)) files[name] = std::move(a->bytes);
  }
  return verify_release(version_id, files, manifest->bytes);
}

UserProfile profile_from_json(std::string_view json_text) {
  const auto doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError(ErrorCode::malformed, "profile must be a JSON object");
  }
  UserProfile p;
  for (const auto& [key, value] : doc.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "yes" : "no";
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<long long>());
    } else if (value.is_null()) {
      continue;
    } else {
      throw ParseError(ErrorCode::malformed, "profile field " + key + " must be a string");
    }
    if (key == "id") continue;
    set_profile_field(p, key, text);
  }
  return p;
}

std::string profile_to_json(const UserProfile& profile) {
  nlohmann::ordered_json j;
  j["id"] = profile.id;
  for (auto field : kProfileFields) j[std::string(field)] = *profile_field(profile, field);
  return j.dump();
}

}  // namespace smscorpus
