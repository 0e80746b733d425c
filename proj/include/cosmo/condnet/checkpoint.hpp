#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cosmo/condnet/net.hpp"
#include "cosmo/declare/universe.hpp"

namespace cosmo::condnet {

// A (constraint vector, first activity) pair kept so simulation can draw
// base conditions without the original log.
struct BaseCase {
    std::string case_id;
    std::string first_activity;
    std::vector<std::uint8_t> bits;
};

struct Checkpoint {
    ConditionedNet net;
    declare::ConstraintUniverse universe;
    std::size_t length_cap = 0;
    nlohmann::json train_config = nlohmann::json::object();
    std::vector<BaseCase> base_pool;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: "COSMOCK1" | u32 version | u64 meta length | meta JSON |
// little-endian f64 tensor data | SHA-256 of everything before it.
std::string serialize_checkpoint(const Checkpoint& ck);
// Throws CheckpointError on bad magic, version, checksum or layout.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Throws FingerprintMismatch unless `u` is the universe the net was trained on.
void require_universe(const Checkpoint& ck, const declare::ConstraintUniverse& u);

} // namespace cosmo::condnet
