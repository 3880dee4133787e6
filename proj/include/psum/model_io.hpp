#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "psum/network.hpp"

// Model file layout, all integers and doubles little-endian:
//
//   "PSUM1"                          5 bytes
//   page_len, embed_dim, hidden_size u32 each
//   W1, b1, W2, b2                   IEEE-754 binary64, row-major
//   checksum                         u64 FNV-1a of every preceding byte
//
// Only the architecture is stored. Training hyperparameters in the loaded
// config keep their defaults.
namespace psum {

inline constexpr char kModelMagic[5] = {'P', 'S', 'U', 'M', '1'};

std::vector<std::uint8_t> serialize_model(const NetworkParams& params);

/// Throws CorruptModelError on bad magic, size or checksum.
NetworkParams deserialize_model(std::span<const std::uint8_t> bytes);

/// Throws OutputError if the file cannot be written.
void save_model(const NetworkParams& params, const std::filesystem::path& path);

/// Throws InputError if the file cannot be read, CorruptModelError if its
/// contents are invalid.
NetworkParams load_model(const std::filesystem::path& path);

}  // namespace psum
