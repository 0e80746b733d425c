#include "cosmo/hash.hpp"

#include <openssl/sha.h>

namespace cosmo {

Digest sha256(std::span<const std::uint8_t> bytes) {
    Digest out{};
    SHA256(bytes.data(), bytes.size(), out.data());
    return out;
}

Digest sha256(std::string_view text) {
    return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::string fingerprint(std::string_view text, std::size_t chars) {
    auto hex = to_hex(sha256(text));
    return hex.substr(0, std::min(chars, hex.size()));
}

} // namespace cosmo
