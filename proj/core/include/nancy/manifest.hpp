#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nancy/ladder.hpp"

namespace nancy {

// Per-chunk byte sizes of a video at every ladder level.
struct VideoManifest {
  std::size_t chunk_count = 0;
  std::vector<std::vector<std::uint64_t>> sizes;  // [chunk][level] bytes

  void validate(std::size_t levels) const;
};

// Synthesizes a manifest around the nominal size bitrate * duration / 8,
// jittered by a seeded factor in [-jitter, +jitter] per (chunk, level).
VideoManifest synth_manifest(const BitrateLadder& ladder, std::size_t chunk_count,
                             double jitter, std::uint64_t seed);

// Text format: one "chunk_index level_index size_bytes" triple per line.
VideoManifest load_manifest(const std::filesystem::path& path, std::size_t levels);
void save_manifest(const VideoManifest& manifest, const std::filesystem::path& path);

}  // namespace nancy
