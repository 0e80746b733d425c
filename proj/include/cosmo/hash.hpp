#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace cosmo {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);

// First `chars` hex digits of the SHA-256 of `text`; used for ids.
std::string fingerprint(std::string_view text, std::size_t chars = 16);

} // namespace cosmo
