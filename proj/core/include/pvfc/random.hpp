#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pvfc {

using Rng = std::mt19937_64;

/// Deterministic child seed from a parent seed and a textual stream tag
/// (splitmix64 over an FNV-1a hash of the tag).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index);

} // namespace pvfc
