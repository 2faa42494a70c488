#pragma once

#include <cstddef>
#include <deque>

#include "nancy/ladder.hpp"
#include "nancy/manifest.hpp"
#include "nancy/qoe.hpp"

// Classical rate-adaptation decision rules, each a pure function of the
// observable state.  All of them pick bitrates only; the surrounding
// harness runs them with rho = 1 and the largest generation size.
namespace nancy::baselines {

// Sliding throughput window plus the relative prediction errors used by
// robustMPC's discounting.
struct PredictorState {
  std::size_t window = 5;
  std::deque<double> throughput_mbps;  // most recent last
  std::deque<double> rel_errors;

  void add_sample(double mbps);
  void add_error(double rel_error);
  double harmonic_mean() const;    // 0 when no samples
  double robust_estimate() const;  // harmonic mean / (1 + max recent error)
};

// Highest level not exceeding the harmonic-mean throughput estimate.
std::size_t rb_select(const PredictorState& pred, const BitrateLadder& ladder);

// Linear map from buffer occupancy to the ladder between a reservoir and
// a cushion.
std::size_t bb_select(double buffer_s, const BitrateLadder& ladder, double reservoir_s,
                      double cushion_s);

// Lyapunov utility-per-byte rule: argmax over levels of
// (V * (ln(S_m / S_0) + gamma_p) - Q) / S_m with Q in chunk units.
// Ties break toward the lower index.
std::size_t bola_select(double buffer_s, const BitrateLadder& ladder, double v_param,
                        double gamma_p, const VideoManifest& manifest,
                        std::size_t chunk_index);

// Control parameter giving BOLA its full ladder range at buffer_cap.
double bola_default_v(const BitrateLadder& ladder, double buffer_cap_s, double gamma_p);

// Exhaustive model-predictive search over all bitrate sequences of the
// given horizon (truncated at video end) under the robust throughput
// estimate; returns the first bitrate of the best sequence.  Ties break
// toward the lexicographically lower sequence.
std::size_t mpc_select(const PredictorState& pred, double buffer_s, std::size_t last_index,
                       const VideoManifest& manifest, std::size_t chunk_index,
                       std::size_t horizon, const qoe::QoEParams& params);

}  // namespace nancy::baselines
