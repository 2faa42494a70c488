#include "nancy/qoe.hpp"

#include <cmath>

namespace nancy::qoe {

QoEParams linear_params(const BitrateLadder& ladder) {
  QoEParams p;
  p.variant = Variant::kLinear;
  p.mu = 4.3;
  p.ladder = ladder;
  p.r_min_kbps = ladder.min_kbps();
  return p;
}

QoEParams log_params(const BitrateLadder& ladder) {
  QoEParams p;
  p.variant = Variant::kLog;
  p.mu = 2.66;
  p.ladder = ladder;
  p.r_min_kbps = ladder.min_kbps();
  return p;
}

QoEParams hd_params(const BitrateLadder& ladder, std::vector<double> hd_scores) {
  if (hd_scores.size() != ladder.size()) {
    throw std::invalid_argument("qoe: hd score table size != ladder size");
  }
  QoEParams p;
  p.variant = Variant::kHd;
  p.mu = 8.0;
  p.ladder = ladder;
  p.r_min_kbps = ladder.min_kbps();
  p.hd_scores = std::move(hd_scores);
  return p;
}

QoEParams make_params(int variant, const BitrateLadder& ladder) {
  switch (variant) {
    case 1: return linear_params(ladder);
    case 2: return log_params(ladder);
    case 3: return hd_params(ladder);
    default: throw std::invalid_argument("qoe: variant must be 1, 2 or 3");
  }
}

double quality(const QoEParams& params, double bitrate_kbps) {
  const std::size_t level = params.ladder.index_of(bitrate_kbps);
  if (level >= params.ladder.size()) throw UnknownLevelError();
  switch (params.variant) {
    case Variant::kLinear: return bitrate_kbps / 1000.0;  // Mbps units
    case Variant::kLog: return std::log(bitrate_kbps / params.r_min_kbps);
    case Variant::kHd: return params.hd_scores[level];
  }
  return 0.0;
}

double chunk_reward(const QoEParams& params, std::optional<double> prev_bitrate_kbps,
                    double bitrate_kbps, double rebuffer_s) {
  const double q = quality(params, bitrate_kbps);
  double smooth = 0.0;
  if (prev_bitrate_kbps) smooth = std::abs(q - quality(params, *prev_bitrate_kbps));
  return q - params.mu * rebuffer_s - smooth;
}

double session_qoe(const QoEParams& params, const ChunkLog& log) {
  if (log.empty()) throw EmptyLogError();
  double total = 0.0;
  std::optional<double> prev;
  for (const auto& c : log) {
    total += chunk_reward(params, prev, c.bitrate_kbps, c.rebuffer_s);
    prev = c.bitrate_kbps;
  }
  return total;
}

}  // namespace nancy::qoe
