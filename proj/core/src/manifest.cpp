#include "nancy/manifest.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "nancy/rng.hpp"

namespace nancy {

void VideoManifest::validate(std::size_t levels) const {
  if (sizes.size() != chunk_count) throw std::invalid_argument("manifest: chunk count mismatch");
  for (const auto& row : sizes) {
    if (row.size() != levels) throw std::invalid_argument("manifest: level count mismatch");
    for (std::size_t l = 1; l < row.size(); ++l) {
      if (row[l] <= row[l - 1]) {
        throw std::invalid_argument("manifest: sizes must be strictly increasing per level");
      }
    }
  }
}

VideoManifest synth_manifest(const BitrateLadder& ladder, std::size_t chunk_count,
                             double jitter, std::uint64_t seed) {
  ladder.validate();
  VideoManifest m;
  m.chunk_count = chunk_count;
  m.sizes.resize(chunk_count);
  for (std::size_t c = 0; c < chunk_count; ++c) {
    m.sizes[c].resize(ladder.size());
    for (std::size_t l = 0; l < ladder.size(); ++l) {
      const double nominal = ladder.levels_kbps[l] * 1000.0 * ladder.chunk_duration_s / 8.0;
      Rng rng(mix_seed(seed, {0x6D616E69ULL, c, l}));
      const double factor = 1.0 + jitter * (2.0 * rng.next_unit() - 1.0);
      m.sizes[c][l] = static_cast<std::uint64_t>(std::llround(nominal * factor));
    }
  }
  m.validate(ladder.size());
  return m;
}

VideoManifest load_manifest(const std::filesystem::path& path, std::size_t levels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
  VideoManifest m;
  std::size_t chunk = 0, level = 0;
  std::uint64_t bytes = 0;
  while (in >> chunk >> level >> bytes) {
    if (chunk >= m.sizes.size()) m.sizes.resize(chunk + 1);
    if (level >= m.sizes[chunk].size()) m.sizes[chunk].resize(level + 1, 0);
    m.sizes[chunk][level] = bytes;
  }
  m.chunk_count = m.sizes.size();
  m.validate(levels);
  return m;
}

void save_manifest(const VideoManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("manifest: cannot write " + path.string());
  for (std::size_t c = 0; c < manifest.chunk_count; ++c) {
    for (std::size_t l = 0; l < manifest.sizes[c].size(); ++l) {
      out << c << ' ' << l << ' ' << manifest.sizes[c][l] << '\n';
    }
  }
}

}  // namespace nancy
