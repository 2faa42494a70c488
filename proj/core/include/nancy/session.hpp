#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nancy/ladder.hpp"
#include "nancy/manifest.hpp"
#include "nancy/qoe.hpp"
#include "nancy/trace.hpp"

// Trace-driven streaming environment: per-chunk download with systematic
// NC protection, per-slice Bernoulli loss, deficit retransmission, and
// playback-buffer dynamics.  One Bernoulli draw per transmitted slice;
// an undecodable generation costs one RTT per repair round until its
// received coefficient rank reaches k_g.
namespace nancy {

struct EpisodeFinishedError : std::logic_error {
  EpisodeFinishedError() : std::logic_error("session: all chunks already downloaded") {}
};

struct ChannelStalledError : std::runtime_error {
  ChannelStalledError() : std::runtime_error("session: loss ratio too high, chunk undeliverable") {}
};

struct SimConfig {
  BitrateLadder ladder;
  std::vector<std::size_t> gen_sizes = {8, 16, 32, 64};          // K alphabet
  std::vector<double> code_rates = {1.0, 0.95, 0.9, 0.85, 0.8};  // rho alphabet
  double buffer_cap_s = 60.0;
  std::size_t slice_bytes = 1024;   // n_s
  std::size_t header_bytes = 16;    // per-slice framing h
  std::size_t chunk_count = 48;
  std::size_t history_len = 8;      // H
  double size_jitter = 0.1;
  std::uint64_t manifest_seed = 9001;
  double loss_ewma_weight = 0.2;
  bool uncoded = false;  // plain slice transfer, no NC (reference environment)

  std::size_t observation_size() const { return 2 * history_len + ladder.size() + 7; }
  std::size_t startup_gen_size_index() const { return gen_sizes.size() - 1; }
};

// Agent action: indices into the bitrate, generation-size and code-rate
// alphabets.
struct Action {
  std::size_t bitrate_index = 0;
  std::size_t gen_size_index = 0;
  std::size_t rate_index = 0;

  bool operator==(const Action&) const = default;
};

struct DownloadResult {
  std::uint64_t source_bytes = 0;  // chunk size at the chosen level
  std::uint64_t sent_bytes = 0;    // payloads + headers, incl. retransmissions
  double download_time_s = 0.0;
  double rebuffer_s = 0.0;         // T_n
  std::size_t retransmission_rounds = 0;
  std::size_t slices_sent = 0;
  std::size_t slices_lost = 0;
  double idle_s = 0.0;             // wait due to full buffer, not penalized
};

struct SessionState {
  double clock_s = 0.0;
  double buffer_s = 0.0;
  std::size_t chunk_index = 0;
  Action last_action{};
  double last_bitrate_kbps = 0.0;
  double last_rho = 1.0;
  std::size_t last_gen_size = 0;
  double last_loss = 0.0;   // measured on the most recent chunk
  double ewma_loss = 0.0;
  std::deque<double> throughput_hist_mbps;  // most recent last, <= H entries
  std::deque<double> download_time_hist_s;
  std::deque<double> loss_hist;
};

using Observation = std::vector<double>;

// Downloads the next chunk and advances the state (clock, buffer,
// histories).  rng_seed fully determines the channel realization.
DownloadResult download_chunk(SessionState& state, const Trace& trace,
                              const VideoManifest& manifest, const SimConfig& cfg,
                              const Action& action, std::uint64_t rng_seed);

// Fixed-length agent-facing feature vector (size cfg.observation_size()).
Observation observe(const SessionState& state, const VideoManifest& manifest,
                    const SimConfig& cfg);

// One streaming episode over a trace.  reset() fetches the startup chunk
// at the lowest level; the agent controls chunks 1..chunk_count-1.
class StreamingSession {
 public:
  struct Step {
    Observation obs;
    double reward = 0.0;
    bool done = false;
    DownloadResult result;
    std::size_t chunk_index = 0;  // chunk this step downloaded
    Action action{};
    double bitrate_kbps = 0.0;
    double buffer_after_s = 0.0;
  };

  StreamingSession(SimConfig cfg, Trace trace, VideoManifest manifest,
                   qoe::QoEParams reward_params, std::uint64_t seed);

  Observation reset();
  Step step(const Action& action);
  bool done() const { return state_.chunk_index >= cfg_.chunk_count; }

  const SessionState& state() const { return state_; }
  SessionState& mutable_state() { return state_; }
  const SimConfig& config() const { return cfg_; }
  const Trace& trace() const { return trace_; }
  const VideoManifest& manifest() const { return manifest_; }
  const qoe::ChunkLog& log() const { return log_; }

 private:
  SimConfig cfg_;
  Trace trace_;
  VideoManifest manifest_;
  qoe::QoEParams reward_params_;
  std::uint64_t seed_;
  SessionState state_;
  std::optional<double> prev_bitrate_;  // reward chaining; startup chunk excluded
  qoe::ChunkLog log_;
};

}  // namespace nancy
