#include "nancy/rlnc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace nancy::rlnc {

InsufficientRankError::InsufficientRankError(std::size_t got_rank, std::size_t need)
    : std::runtime_error("rlnc: received rank " + std::to_string(got_rank) + " of " +
                         std::to_string(need) + " needed to decode"),
      rank(got_rank),
      needed(need) {}

std::size_t GenerationPlan::total_source_slices() const {
  std::size_t m = 0;
  for (const auto& e : entries) m += e.source_slices;
  return m;
}

std::size_t GenerationPlan::total_coded_slices() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.coded_slices;
  return n;
}

std::size_t coded_slices_for(std::size_t source_slices, double code_rate) {
  if (!(code_rate > 0.0) || code_rate > 1.0) throw InvalidRateError();
  const double raw = static_cast<double>(source_slices) / code_rate;
  auto n = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::max(n, source_slices);
}

GenerationPlan plan_generations(std::size_t chunk_bytes, std::size_t slice_bytes,
                                std::size_t gen_size, double code_rate) {
  if (chunk_bytes == 0) throw InvalidSizeError("rlnc: chunk size must be positive");
  if (slice_bytes == 0) throw InvalidSizeError("rlnc: slice size must be positive");
  if (gen_size == 0) throw InvalidSizeError("rlnc: generation size must be positive");
  if (!(code_rate > 0.0) || code_rate > 1.0) throw InvalidRateError();

  const std::size_t m = (chunk_bytes + slice_bytes - 1) / slice_bytes;
  const std::size_t gens = (m + gen_size - 1) / gen_size;

  GenerationPlan plan;
  plan.slice_bytes = slice_bytes;
  plan.chunk_bytes = chunk_bytes;
  plan.entries.reserve(gens);
  for (std::size_t g = 0; g < gens; ++g) {
    const std::size_t k = (g + 1 < gens) ? gen_size : m - gen_size * (gens - 1);
    plan.entries.push_back({k, coded_slices_for(k, code_rate)});
  }
  return plan;
}

gf256::FieldMatrix generation_source(std::span<const std::uint8_t> chunk,
                                     const GenerationPlan& plan, std::size_t gen_index) {
  const std::size_t ns = plan.slice_bytes;
  std::size_t first_slice = 0;
  for (std::size_t g = 0; g < gen_index; ++g) first_slice += plan.entries[g].source_slices;

  const std::size_t k = plan.entries[gen_index].source_slices;
  gf256::FieldMatrix src(ns, k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t offset = (first_slice + j) * ns;
    const std::size_t avail = offset < chunk.size() ? std::min(ns, chunk.size() - offset) : 0;
    for (std::size_t r = 0; r < avail; ++r) src.at(r, j) = chunk[offset + r];
    // rows beyond avail stay zero: padding of the chunk's last slice
  }
  return src;
}

std::vector<std::uint8_t> assemble_chunk(const GenerationPlan& plan,
                                         const std::vector<gf256::FieldMatrix>& generations) {
  std::vector<std::uint8_t> out;
  out.reserve(plan.total_source_slices() * plan.slice_bytes);
  for (const auto& m : generations) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(m.at(r, c));
    }
  }
  out.resize(plan.chunk_bytes);
  return out;
}

std::vector<gf256::FieldElement> random_coefficients(std::size_t count, Rng& rng) {
  std::vector<gf256::FieldElement> c(count);
  bool all_zero = true;
  do {
    all_zero = true;
    for (auto& v : c) {
      v = rng.next_byte();
      all_zero = all_zero && v == 0;
    }
  } while (all_zero);
  return c;
}

std::vector<CodedSlice> encode_generation(const gf256::FieldMatrix& source,
                                          std::size_t coded_count, std::uint64_t seed) {
  const std::size_t k = source.cols();
  const std::size_t ns = source.rows();
  if (coded_count < k) throw InvalidPlanError();

  std::vector<CodedSlice> out;
  out.reserve(coded_count);
  for (std::size_t i = 0; i < k; ++i) {
    CodedSlice s;
    s.coeffs.assign(k, 0);
    s.coeffs[i] = 1;
    s.payload = source.column(i);
    s.is_systematic = true;
    out.push_back(std::move(s));
  }

  Rng rng(seed);
  for (std::size_t i = k; i < coded_count; ++i) {
    CodedSlice s;
    s.coeffs = random_coefficients(k, rng);
    s.payload.assign(ns, 0);
    for (std::size_t j = 0; j < k; ++j) {
      const auto cj = s.coeffs[j];
      if (cj == 0) continue;
      for (std::size_t r = 0; r < ns; ++r) {
        s.payload[r] = gf256::add(s.payload[r], gf256::mul(cj, source.at(r, j)));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

gf256::FieldMatrix decode_generation(const std::vector<CodedSlice>& slices,
                                     std::size_t source_count) {
  const std::size_t k = source_count;
  for (const auto& s : slices) {
    if (s.coeffs.size() != k) throw gf256::ShapeError("rlnc: coefficient length != k_g");
    if (s.generation_index != slices.front().generation_index) {
      throw gf256::ShapeError("rlnc: slices from different generations");
    }
  }

  // Systematic fast path: all k source slices arrived untouched.
  {
    std::vector<const CodedSlice*> sys(k, nullptr);
    std::size_t have = 0;
    for (const auto& s : slices) {
      if (!s.is_systematic) continue;
      const std::size_t idx =
          static_cast<std::size_t>(std::find(s.coeffs.begin(), s.coeffs.end(), 1) -
                                   s.coeffs.begin());
      if (idx < k && sys[idx] == nullptr) {
        sys[idx] = &s;
        ++have;
      }
    }
    if (have == k) {
      gf256::FieldMatrix src(sys[0]->payload.size(), k);
      for (std::size_t j = 0; j < k; ++j) src.set_column(j, sys[j]->payload);
      return src;
    }
  }

  // Pick k linearly independent received slices by incremental elimination.
  RankTracker tracker(k);
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < slices.size() && !tracker.complete(); ++i) {
    if (tracker.absorb(slices[i].coeffs)) picked.push_back(i);
  }
  if (!tracker.complete()) throw InsufficientRankError(tracker.rank(), k);

  const std::size_t ns = slices[picked[0]].payload.size();
  gf256::FieldMatrix coeff(k, k);    // columns = coefficient vectors
  gf256::FieldMatrix payload(ns, k);  // columns = received payloads
  for (std::size_t j = 0; j < k; ++j) {
    coeff.set_column(j, slices[picked[j]].coeffs);
    payload.set_column(j, slices[picked[j]].payload);
  }
  return gf256::solve(coeff, payload);
}

double decode_failure_prob(std::size_t k, std::size_t n, double loss_ratio,
                           std::size_t trials, std::uint64_t seed) {
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, {0x6C6F7373ULL, t}));
    RankTracker tracker(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (!rng.next_bernoulli(loss_ratio)) tracker.absorb_unit(i);
    }
    for (std::size_t i = k; i < n; ++i) {
      const bool lost = rng.next_bernoulli(loss_ratio);
      if (lost) continue;
      if (!tracker.complete()) tracker.absorb(random_coefficients(k, rng));
    }
    if (!tracker.complete()) ++failures;
  }
  return trials == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(trials);
}

RankTracker::RankTracker(std::size_t dim) : dim_(dim), basis_(dim) {}

bool RankTracker::absorb_unit(std::size_t index) {
  std::vector<gf256::FieldElement> col(dim_, 0);
  col[index] = 1;
  return absorb(std::move(col));
}

bool RankTracker::absorb(std::vector<gf256::FieldElement> column) {
  for (std::size_t p = 0; p < dim_; ++p) {
    if (column[p] == 0) continue;
    if (basis_[p].empty()) {
      const auto scale = gf256::inv(column[p]);
      for (auto& v : column) v = gf256::mul(v, scale);
      basis_[p] = std::move(column);
      ++rank_;
      return true;
    }
    const auto f = column[p];
    const auto& b = basis_[p];
    for (std::size_t j = p; j < dim_; ++j) {
      column[j] = gf256::add(column[j], gf256::mul(f, b[j]));
    }
  }
  return false;
}

}  // namespace nancy::rlnc
