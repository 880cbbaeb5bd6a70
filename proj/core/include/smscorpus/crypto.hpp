#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smscorpus::crypto {

using Bytes = std::vector<std::uint8_t>;

Bytes hmac_sha256(std::span<const std::uint8_t> key, std::string_view message);
std::string sha256_hex(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::optional<Bytes> from_hex(std::string_view hex);

/// Cryptographically secure random bytes.
Bytes random_bytes(std::size_t n);

/// Length-independent comparison.
bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace smscorpus::crypto
