#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smscorpus/crypto.hpp"
#include "smscorpus/types.hpp"

namespace smscorpus {

/// One message as received, before anonymization.
struct RawMessage {
  std::string body_raw;
  std::optional<std::string> sender_raw;
  std::optional<std::string> receiver_raw;
  std::optional<Timestamp> sent_at;

  bool operator==(const RawMessage&) const = default;
};

struct ParsedMessages {
  std::vector<RawMessage> messages;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Web transcription form
//
//   SMS-CORPUS-TRANSCRIPTION v1
//   language: english|chinese
//   count: <n>
//   --msg--
//   <body lines>
//   --msg--
//   ...

inline constexpr std::string_view kTranscriptionHeader = "SMS-CORPUS-TRANSCRIPTION v1";

/// Maximum messages per transcription submission, per declared language.
struct TranscriptionBounds {
  std::size_t english_max = 5;
  std::size_t chinese_max = 20;
};

struct TranscriptionRecord {
  Language declared_language = Language::unknown;
  std::vector<RawMessage> messages;
};

TranscriptionRecord parse_transcription(std::string_view form_record,
                                        const TranscriptionBounds& bounds = {});

// ---------------------------------------------------------------------------
// Phone export archives
//
// CSV: header `direction,peer_number,timestamp,body`, RFC 4180 quoting.
// XML: <messages><message direction=".." peer=".." time="..">body</message></messages>

enum class ExportFormat { csv, xml };

ParsedMessages parse_export(std::string_view bytes,
                            std::optional<ExportFormat> format_hint = std::nullopt);

// ---------------------------------------------------------------------------
// Android app draft upload
//
//   SMS-CORPUS-UPLOAD v1
//   code: <8 hex>
//   device: <token>
//   count: <n>
//   --msg--
//   time: <ISO-8601|->
//   peer: <token|->
//   <body lines>

inline constexpr std::string_view kUploadHeader = "SMS-CORPUS-UPLOAD v1";
inline constexpr std::string_view kMessageDelimiter = "--msg--";

struct UploadDraft {
  std::string verification_code;
  std::string device_id_token;
  std::vector<RawMessage> messages;

  bool operator==(const UploadDraft&) const = default;
};

UploadDraft parse_upload_draft(std::string_view text);

/// Renders a draft in the upload grammar; parse_upload_draft inverts it.
std::string format_upload_draft(const UploadDraft& draft);

/// First 8 lowercase hex characters of HMAC-SHA256 over the device token and
/// message count. This is what the app shows the contributor.
std::string upload_verification_code(std::string_view device_id_token,
                                     std::size_t message_count,
                                     std::span<const std::uint8_t> secret);

/// Never throws.
bool verify_upload(const UploadDraft& draft, std::span<const std::uint8_t> secret) noexcept;

// ---------------------------------------------------------------------------

enum class InputFormat { transcription, export_csv, export_xml, upload_draft, unknown };

std::string_view to_string(InputFormat format);

/// Classifies by the first line after an optional BOM. Never throws.
InputFormat detect_format(std::string_view bytes) noexcept;

}  // namespace smscorpus
