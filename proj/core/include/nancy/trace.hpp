#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nancy {

struct TraceParseError : std::runtime_error {
  TraceParseError(const std::string& what, std::size_t line_number);
  std::size_t line;
};

struct EmptyTraceError : std::runtime_error {
  explicit EmptyTraceError(const std::string& path)
      : std::runtime_error("trace: no samples in " + path) {}
};

struct TraceSample {
  double time_s = 0.0;
  double bandwidth_mbps = 0.0;
};

// A bandwidth trace plus the channel parameters of one run.  Samples are
// a step function: sample i's bandwidth holds until the next timestamp.
// The final segment lasts as long as the one before it (a single-sample
// trace is constant), after which the trace repeats.
struct Trace {
  std::vector<TraceSample> samples;
  double loss_ratio = 0.0;  // per-slice Bernoulli loss probability
  double rtt_s = 0.08;
  std::string name;

  double period_s() const;
};

// Parses the canonical "seconds bandwidth_mbps" text format, one sample
// per line; '#' starts a comment.  Timestamps must be strictly
// increasing and bandwidths positive.
Trace load_trace(const std::filesystem::path& path, double loss_ratio, double rtt_s);

// All *.txt / *.trace / extensionless files in a directory, sorted by name.
std::vector<Trace> load_trace_dir(const std::filesystem::path& dir, double loss_ratio,
                                  double rtt_s);

// Smallest delta such that the bandwidth integral over
// [start_clock, start_clock + delta) carries byte_count bytes, looping
// the trace as needed.  Excludes any latency term.
double transfer_time(const Trace& trace, double start_clock_s, double byte_count);

}  // namespace nancy
