#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nancy {

// The discrete set of encoded quality levels a client may request.
struct BitrateLadder {
  std::vector<double> levels_kbps = {300, 750, 1200, 1850, 2850, 4300};
  double chunk_duration_s = 4.0;
  std::size_t hd_threshold_index = 3;

  std::size_t size() const { return levels_kbps.size(); }
  std::size_t top_index() const { return levels_kbps.size() - 1; }
  double max_kbps() const { return levels_kbps.back(); }
  double min_kbps() const { return levels_kbps.front(); }

  // Index of an exact ladder level; returns size() when absent.
  std::size_t index_of(double kbps) const {
    for (std::size_t i = 0; i < levels_kbps.size(); ++i) {
      if (levels_kbps[i] == kbps) return i;
    }
    return levels_kbps.size();
  }

  void validate() const {
    if (levels_kbps.empty()) throw std::invalid_argument("ladder: no levels");
    for (std::size_t i = 1; i < levels_kbps.size(); ++i) {
      if (levels_kbps[i] <= levels_kbps[i - 1]) {
        throw std::invalid_argument("ladder: levels must be strictly ascending");
      }
    }
  }
};

}  // namespace nancy
