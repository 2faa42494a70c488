#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "nancy/ladder.hpp"

// Per-chunk and per-session quality-of-experience scoring:
//   QoE = sum q(R_n) - mu * sum T_n - sum |q(R_{n+1}) - q(R_n)|
// with three conventional variants for q and mu.
namespace nancy::qoe {

struct UnknownLevelError : std::invalid_argument {
  UnknownLevelError() : std::invalid_argument("qoe: bitrate is not a ladder level") {}
};

struct EmptyLogError : std::invalid_argument {
  EmptyLogError() : std::invalid_argument("qoe: empty chunk log") {}
};

enum class Variant { kLinear, kLog, kHd };

struct QoEParams {
  Variant variant = Variant::kLinear;
  double mu = 4.3;
  BitrateLadder ladder;
  double r_min_kbps = 0.0;          // lowest ladder level
  std::vector<double> hd_scores;    // per-level scores for the HD variant
};

// QoE1: q(R) = R in Mbps, mu = 4.3.
QoEParams linear_params(const BitrateLadder& ladder);
// QoE2: q(R) = ln(R / R_min), mu = 2.66.
QoEParams log_params(const BitrateLadder& ladder);
// QoE3: per-level HD scores, mu = 8.
QoEParams hd_params(const BitrateLadder& ladder,
                    std::vector<double> hd_scores = {1, 2, 3, 12, 15, 20});

QoEParams make_params(int variant, const BitrateLadder& ladder);

struct ChunkSample {
  double bitrate_kbps = 0.0;  // R_n
  double rebuffer_s = 0.0;    // T_n
};
using ChunkLog = std::vector<ChunkSample>;

// q(R_n) for a bitrate that must be a ladder level.
double quality(const QoEParams& params, double bitrate_kbps);

// Eq. attribution per chunk: q(r) - mu*T - |q(r) - q(prev)|; the
// smoothness term is dropped for the first chunk (no predecessor).
double chunk_reward(const QoEParams& params, std::optional<double> prev_bitrate_kbps,
                    double bitrate_kbps, double rebuffer_s);

// Full-session score; equals the sum of chained chunk_reward calls.
double session_qoe(const QoEParams& params, const ChunkLog& log);

}  // namespace nancy::qoe
