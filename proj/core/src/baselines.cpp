#include "nancy/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nancy::baselines {

void PredictorState::add_sample(double mbps) {
  throughput_mbps.push_back(mbps);
  while (throughput_mbps.size() > window) throughput_mbps.pop_front();
}

void PredictorState::add_error(double rel_error) {
  rel_errors.push_back(rel_error);
  while (rel_errors.size() > window) rel_errors.pop_front();
}

double PredictorState::harmonic_mean() const {
  if (throughput_mbps.empty()) return 0.0;
  double denom = 0.0;
  for (double v : throughput_mbps) denom += 1.0 / v;
  return static_cast<double>(throughput_mbps.size()) / denom;
}

double PredictorState::robust_estimate() const {
  double max_err = 0.0;
  for (double e : rel_errors) max_err = std::max(max_err, e);
  return harmonic_mean() / (1.0 + max_err);
}

std::size_t rb_select(const PredictorState& pred, const BitrateLadder& ladder) {
  const double estimate_kbps = pred.harmonic_mean() * 1000.0;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder.levels_kbps[i] <= estimate_kbps) pick = i;
  }
  return pick;
}

std::size_t bb_select(double buffer_s, const BitrateLadder& ladder, double reservoir_s,
                      double cushion_s) {
  if (buffer_s <= reservoir_s) return 0;
  if (buffer_s >= reservoir_s + cushion_s) return ladder.top_index();
  const double f = (buffer_s - reservoir_s) / cushion_s;
  return static_cast<std::size_t>(f * static_cast<double>(ladder.top_index()));
}

std::size_t bola_select(double buffer_s, const BitrateLadder& ladder, double v_param,
                        double gamma_p, const VideoManifest& manifest,
                        std::size_t chunk_index) {
  const auto& sizes = manifest.sizes[std::min(chunk_index, manifest.chunk_count - 1)];
  const double q_chunks = buffer_s / ladder.chunk_duration_s;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < ladder.size(); ++m) {
    const double s = static_cast<double>(sizes[m]);
    const double utility = std::log(s / static_cast<double>(sizes[0]));
    const double score = (v_param * (utility + gamma_p) - q_chunks) / s;
    if (score > best_score) {
      best_score = score;
      best = m;
    }
  }
  return best;
}

double bola_default_v(const BitrateLadder& ladder, double buffer_cap_s, double gamma_p) {
  // Nominal utility range from the bitrate ratio; sizes scale with bitrate.
  const double u_max = std::log(ladder.max_kbps() / ladder.min_kbps());
  const double q_max = buffer_cap_s / ladder.chunk_duration_s;
  return (q_max - 1.0) / (u_max + gamma_p);
}

std::size_t mpc_select(const PredictorState& pred, double buffer_s, std::size_t last_index,
                       const VideoManifest& manifest, std::size_t chunk_index,
                       std::size_t horizon, const qoe::QoEParams& params) {
  const double bandwidth_bps = pred.robust_estimate() * 1e6;
  const std::size_t levels = params.ladder.size();
  const std::size_t steps =
      std::min(horizon, manifest.chunk_count > chunk_index
                            ? manifest.chunk_count - chunk_index
                            : std::size_t{0});
  if (steps == 0) return last_index;

  std::vector<std::size_t> seq(steps, 0);
  std::vector<std::size_t> best_seq(steps, 0);
  double best_score = -std::numeric_limits<double>::infinity();

  const double q_last = qoe::quality(params, params.ladder.levels_kbps[last_index]);
  while (true) {
    double buf = buffer_s;
    double prev_q = q_last;
    double score = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      const double bytes = static_cast<double>(manifest.sizes[chunk_index + i][seq[i]]);
      const double dl = bandwidth_bps > 0.0 ? bytes * 8.0 / bandwidth_bps : 1e9;
      const double rebuf = std::max(0.0, dl - buf);
      buf = std::max(0.0, buf - dl) + params.ladder.chunk_duration_s;
      const double q = qoe::quality(params, params.ladder.levels_kbps[seq[i]]);
      score += q - params.mu * rebuf - std::abs(q - prev_q);
      prev_q = q;
    }
    if (score > best_score) {
      best_score = score;
      best_seq = seq;
    }
    // next sequence in lexicographic order
    std::size_t pos = steps;
    while (pos > 0) {
      --pos;
      if (++seq[pos] < levels) break;
      seq[pos] = 0;
      if (pos == 0) return best_seq[0];
    }
  }
}

}  // namespace nancy::baselines
