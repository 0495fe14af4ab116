// checkpoint.hpp — versioned binary run snapshots (magic "PWSIM1").
//
// Layout (little-endian): magic[6], u32 version, config JSON (u64 length +
// bytes), u64 step, grid (u8 boundary, u64 dims, per axis f64 min, f64 max,
// u64 points), u64 labels, f64 time, amplitudes (2 x f64 each), ensemble
// (u64 count, per point u64 dims + f64 coords), RNG state (u64 length +
// text). Writes go through a temp file + rename, loads validate sizes and
// reject short files without returning partial state.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pwsim/wavefunction.hpp"

namespace pwsim {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    std::uint32_t version = kCheckpointVersion;
    std::string config_json;
    std::uint64_t step = 0;
    LabeledWavefunction state;
    std::vector<BeableConfiguration> ensemble;
    std::string rng_state;
};

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pwsim
