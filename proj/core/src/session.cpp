#include "nancy/session.hpp"

#include <algorithm>
#include <cmath>

#include "nancy/rlnc.hpp"
#include "nancy/rng.hpp"

namespace nancy {

namespace {

constexpr std::uint64_t kLossTag = 0x6C6F7374ULL;   // per-round loss stream
constexpr std::uint64_t kCoeffTag = 0x636F6566ULL;  // per-slice repair coefficients
constexpr std::size_t kMaxRounds = 100000;

struct ChannelTally {
  std::uint64_t payload_bytes = 0;
  std::size_t slices_sent = 0;
  std::size_t slices_lost = 0;
  std::size_t rounds = 0;
};

// One generation through the lossy channel: initial coded slices, then
// deficit repair rounds until the received coefficient rank reaches k.
// Slice payload sizes are n_s except the chunk's final source slice,
// which is counted at its unpadded length.
void run_generation(ChannelTally& tally, const SimConfig& cfg, double loss_ratio,
                    std::uint64_t chunk_seed, std::size_t gen_index, std::size_t k,
                    std::size_t n, std::size_t first_slice, std::size_t last_slice_global,
                    std::size_t tail_bytes) {
  rlnc::RankTracker tracker(k);
  Rng loss_rng(mix_seed(chunk_seed, {kLossTag, gen_index, 0}));

  for (std::size_t i = 0; i < n; ++i) {
    const bool systematic = i < k;
    const bool lost = loss_rng.next_bernoulli(loss_ratio);
    const bool tail = systematic && first_slice + i == last_slice_global;
    tally.payload_bytes += (tail ? tail_bytes : cfg.slice_bytes) + cfg.header_bytes;
    ++tally.slices_sent;
    if (lost) {
      ++tally.slices_lost;
      continue;
    }
    if (tracker.complete()) continue;
    if (systematic) {
      tracker.absorb_unit(i);
    } else {
      Rng coeff_rng(mix_seed(chunk_seed, {kCoeffTag, gen_index, 0, i}));
      tracker.absorb(rlnc::random_coefficients(k, coeff_rng));
    }
  }

  std::size_t round = 0;
  while (!tracker.complete()) {
    ++round;
    if (round > kMaxRounds) throw ChannelStalledError();
    Rng round_rng(mix_seed(chunk_seed, {kLossTag, gen_index, round}));
    const std::size_t deficit = k - tracker.rank();
    for (std::size_t i = 0; i < deficit; ++i) {
      const bool lost = round_rng.next_bernoulli(loss_ratio);
      tally.payload_bytes += cfg.slice_bytes + cfg.header_bytes;
      ++tally.slices_sent;
      if (lost) {
        ++tally.slices_lost;
        continue;
      }
      if (tracker.complete()) continue;
      Rng coeff_rng(mix_seed(chunk_seed, {kCoeffTag, gen_index, round, i}));
      tracker.absorb(rlnc::random_coefficients(k, coeff_rng));
    }
  }
  tally.rounds += round;
}

// Reference path without coding: every slice must arrive; missing ones
// are retransmitted verbatim, one RTT per round.
void run_uncoded(ChannelTally& tally, const SimConfig& cfg, double loss_ratio,
                 std::uint64_t chunk_seed, std::size_t slice_count, std::size_t tail_bytes) {
  std::vector<std::size_t> missing;
  {
    Rng loss_rng(mix_seed(chunk_seed, {kLossTag, 0, 0}));
    for (std::size_t i = 0; i < slice_count; ++i) {
      const bool lost = loss_rng.next_bernoulli(loss_ratio);
      const bool tail = i + 1 == slice_count;
      tally.payload_bytes += (tail ? tail_bytes : cfg.slice_bytes) + cfg.header_bytes;
      ++tally.slices_sent;
      if (lost) {
        ++tally.slices_lost;
        missing.push_back(i);
      }
    }
  }
  std::size_t round = 0;
  while (!missing.empty()) {
    ++round;
    if (round > kMaxRounds) throw ChannelStalledError();
    Rng round_rng(mix_seed(chunk_seed, {kLossTag, 0, round}));
    std::vector<std::size_t> still_missing;
    for (std::size_t idx : missing) {
      const bool lost = round_rng.next_bernoulli(loss_ratio);
      const bool tail = idx + 1 == slice_count;
      tally.payload_bytes += (tail ? tail_bytes : cfg.slice_bytes) + cfg.header_bytes;
      ++tally.slices_sent;
      if (lost) {
        ++tally.slices_lost;
        still_missing.push_back(idx);
      }
    }
    missing.swap(still_missing);
  }
  tally.rounds = round;
}

}  // namespace

DownloadResult download_chunk(SessionState& state, const Trace& trace,
                              const VideoManifest& manifest, const SimConfig& cfg,
                              const Action& action, std::uint64_t rng_seed) {
  if (state.chunk_index >= manifest.chunk_count) throw EpisodeFinishedError();
  if (trace.loss_ratio >= 1.0) throw ChannelStalledError();

  const std::uint64_t chunk_bytes = manifest.sizes[state.chunk_index][action.bitrate_index];
  const std::size_t gen_size = cfg.gen_sizes[action.gen_size_index];
  const double rho = cfg.code_rates[action.rate_index];

  const auto plan = rlnc::plan_generations(chunk_bytes, cfg.slice_bytes, gen_size, rho);
  const std::size_t m = plan.total_source_slices();
  const std::size_t tail_bytes = chunk_bytes - (m - 1) * cfg.slice_bytes;

  ChannelTally tally;
  if (cfg.uncoded) {
    run_uncoded(tally, cfg, trace.loss_ratio, rng_seed, m, tail_bytes);
  } else {
    std::size_t first_slice = 0;
    for (std::size_t g = 0; g < plan.entries.size(); ++g) {
      const auto& e = plan.entries[g];
      run_generation(tally, cfg, trace.loss_ratio, rng_seed, g, e.source_slices,
                     e.coded_slices, first_slice, m - 1, tail_bytes);
      first_slice += e.source_slices;
    }
  }

  DownloadResult res;
  res.source_bytes = chunk_bytes;
  res.sent_bytes = tally.payload_bytes;
  res.retransmission_rounds = tally.rounds;
  res.slices_sent = tally.slices_sent;
  res.slices_lost = tally.slices_lost;

  const double wire_time =
      transfer_time(trace, state.clock_s, static_cast<double>(tally.payload_bytes));
  res.download_time_s = wire_time + trace.rtt_s * (1.0 + static_cast<double>(tally.rounds));
  res.rebuffer_s = std::max(0.0, res.download_time_s - state.buffer_s);

  const double drained = std::max(0.0, state.buffer_s - res.download_time_s);
  const double raw_after = drained + cfg.ladder.chunk_duration_s;
  res.idle_s = std::max(0.0, raw_after - cfg.buffer_cap_s);
  const double buffer_after = std::min(cfg.buffer_cap_s, raw_after);

  state.clock_s += res.download_time_s + res.idle_s;
  state.buffer_s = buffer_after;

  const double measured_loss =
      res.slices_sent == 0
          ? 0.0
          : static_cast<double>(res.slices_lost) / static_cast<double>(res.slices_sent);
  state.last_loss = measured_loss;
  state.ewma_loss = (1.0 - cfg.loss_ewma_weight) * state.ewma_loss +
                    cfg.loss_ewma_weight * measured_loss;

  const double throughput_mbps =
      res.download_time_s > 0.0
          ? static_cast<double>(res.sent_bytes) * 8.0 / res.download_time_s / 1e6
          : 0.0;
  auto push = [&](std::deque<double>& hist, double v) {
    hist.push_back(v);
    while (hist.size() > cfg.history_len) hist.pop_front();
  };
  push(state.throughput_hist_mbps, throughput_mbps);
  push(state.download_time_hist_s, res.download_time_s);
  push(state.loss_hist, measured_loss);

  state.last_action = action;
  state.last_bitrate_kbps = cfg.ladder.levels_kbps[action.bitrate_index];
  state.last_rho = rho;
  state.last_gen_size = gen_size;
  ++state.chunk_index;
  return res;
}

Observation observe(const SessionState& state, const VideoManifest& manifest,
                    const SimConfig& cfg) {
  const std::size_t h = cfg.history_len;
  Observation obs;
  obs.reserve(cfg.observation_size());

  auto push_history = [&](const std::deque<double>& hist, double scale) {
    for (std::size_t i = hist.size(); i < h; ++i) obs.push_back(0.0);  // zero padding, oldest
    for (double v : hist) obs.push_back(v * scale);
  };
  push_history(state.throughput_hist_mbps, 0.1);
  push_history(state.download_time_hist_s, 0.1);

  for (std::size_t l = 0; l < cfg.ladder.size(); ++l) {
    const double next_bytes = state.chunk_index < manifest.chunk_count
                                  ? static_cast<double>(manifest.sizes[state.chunk_index][l])
                                  : 0.0;
    obs.push_back(next_bytes / 1e6);
  }

  obs.push_back(state.buffer_s * 0.1);
  obs.push_back(static_cast<double>(cfg.chunk_count - state.chunk_index) /
                static_cast<double>(cfg.chunk_count));
  obs.push_back(state.last_bitrate_kbps / cfg.ladder.max_kbps());
  obs.push_back(state.last_rho);
  obs.push_back(static_cast<double>(state.last_gen_size) /
                static_cast<double>(cfg.gen_sizes.back()));
  obs.push_back(state.last_loss / 0.02);
  obs.push_back(state.ewma_loss / 0.02);
  return obs;
}

StreamingSession::StreamingSession(SimConfig cfg, Trace trace, VideoManifest manifest,
                                   qoe::QoEParams reward_params, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      trace_(std::move(trace)),
      manifest_(std::move(manifest)),
      reward_params_(std::move(reward_params)),
      seed_(seed) {
  cfg_.ladder.validate();
  reset();
}

Observation StreamingSession::reset() {
  state_ = SessionState{};
  state_.last_rho = cfg_.code_rates.front();
  state_.last_gen_size = cfg_.gen_sizes[cfg_.startup_gen_size_index()];
  prev_bitrate_.reset();
  log_.clear();

  // Startup chunk: lowest level, max generation size, first code rate.
  Action startup{0, cfg_.startup_gen_size_index(), 0};
  download_chunk(state_, trace_, manifest_, cfg_, startup, mix_seed(seed_, {0}));
  return observe(state_, manifest_, cfg_);
}

StreamingSession::Step StreamingSession::step(const Action& action) {
  if (done()) throw EpisodeFinishedError();

  Step out;
  out.chunk_index = state_.chunk_index;
  out.action = action;
  out.result = download_chunk(state_, trace_, manifest_, cfg_, action,
                              mix_seed(seed_, {out.chunk_index}));
  out.bitrate_kbps = cfg_.ladder.levels_kbps[action.bitrate_index];
  out.buffer_after_s = state_.buffer_s;
  out.reward = qoe::chunk_reward(reward_params_, prev_bitrate_, out.bitrate_kbps,
                                 out.result.rebuffer_s);
  prev_bitrate_ = out.bitrate_kbps;
  log_.push_back({out.bitrate_kbps, out.result.rebuffer_s});

  out.done = done();
  out.obs = observe(state_, manifest_, cfg_);
  return out;
}

}  // namespace nancy
