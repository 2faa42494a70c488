#include "nancy/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace nancy {

TraceParseError::TraceParseError(const std::string& what, std::size_t line_number)
    : std::runtime_error("trace: " + what + " at line " + std::to_string(line_number)),
      line(line_number) {}

double Trace::period_s() const {
  const std::size_t n = samples.size();
  if (n <= 1) return 0.0;  // constant trace, no meaningful period
  const double tail = samples[n - 1].time_s - samples[n - 2].time_s;
  return samples[n - 1].time_s - samples[0].time_s + tail;
}

Trace load_trace(const std::filesystem::path& path, double loss_ratio, double rtt_s) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace: cannot open " + path.string());

  Trace trace;
  trace.loss_ratio = loss_ratio;
  trace.rtt_s = rtt_s;
  trace.name = path.stem().string();

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

    const char* p = line.c_str();
    char* end = nullptr;
    const double t = std::strtod(p, &end);
    if (end == p) throw TraceParseError("expected timestamp", line_no);
    p = end;
    const double bw = std::strtod(p, &end);
    if (end == p) throw TraceParseError("expected bandwidth", line_no);
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') throw TraceParseError("trailing characters", line_no);

    if (!trace.samples.empty() && t <= trace.samples.back().time_s) {
      throw TraceParseError("timestamps must be strictly increasing", line_no);
    }
    if (!(bw > 0.0)) throw TraceParseError("bandwidth must be positive", line_no);
    trace.samples.push_back({t, bw});
  }
  if (trace.samples.empty()) throw EmptyTraceError(path.string());
  return trace;
}

std::vector<Trace> load_trace_dir(const std::filesystem::path& dir, double loss_ratio,
                                  double rtt_s) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext.empty() || ext == ".txt" || ext == ".trace") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Trace> traces;
  traces.reserve(files.size());
  for (const auto& f : files) traces.push_back(load_trace(f, loss_ratio, rtt_s));
  return traces;
}

double transfer_time(const Trace& trace, double start_clock_s, double byte_count) {
  if (byte_count <= 0.0) return 0.0;
  const auto& s = trace.samples;
  double bits = byte_count * 8.0;
  if (s.size() == 1) return bits / (s[0].bandwidth_mbps * 1e6);

  const std::size_t n = s.size();
  const double t0 = s[0].time_s;
  auto seg_duration = [&](std::size_t i) {
    return i + 1 < n ? s[i + 1].time_s - s[i].time_s : s[n - 1].time_s - s[n - 2].time_s;
  };
  const double period = trace.period_s();
  double period_bits = 0.0;
  for (std::size_t i = 0; i < n; ++i) period_bits += s[i].bandwidth_mbps * 1e6 * seg_duration(i);

  double local = std::fmod(start_clock_s - t0, period);
  if (local < 0.0) local += period;

  // locate the segment containing `local`
  std::size_t idx = 0;
  double offset = 0.0;
  double acc = 0.0;
  for (idx = 0; idx < n; ++idx) {
    const double d = seg_duration(idx);
    if (local < acc + d) {
      offset = local - acc;
      break;
    }
    acc += d;
  }
  if (idx == n) {  // local landed exactly on the period boundary
    idx = 0;
    offset = 0.0;
  }

  double delta = 0.0;
  while (true) {
    const double avail = seg_duration(idx) - offset;
    const double rate = s[idx].bandwidth_mbps * 1e6;
    const double seg_bits = rate * avail;
    if (bits <= seg_bits) return delta + bits / rate;
    delta += avail;
    bits -= seg_bits;
    idx = (idx + 1) % n;
    offset = 0.0;
    if (idx == 0 && bits >= period_bits) {
      const double laps = std::floor(bits / period_bits);
      delta += laps * period;
      bits -= laps * period_bits;
    }
  }
}

}  // namespace nancy
