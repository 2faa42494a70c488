#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nancy/gf256.hpp"
#include "nancy/rng.hpp"

// Systematic per-generation random linear network coding.  A chunk of
// n_c bytes is cut into m = ceil(n_c / n_s) slices of n_s bytes (last
// slice zero-padded), the slices are grouped into generations of at most
// K source slices, and each generation of k slices is expanded into
// n = ceil(k / rho) coded slices: the k source slices verbatim plus
// n - k random linear combinations.  Any k received slices with
// coefficient rank k recover the generation.
namespace nancy::rlnc {

struct InvalidRateError : std::invalid_argument {
  InvalidRateError() : std::invalid_argument("rlnc: code rate must be in (0, 1]") {}
};

struct InvalidSizeError : std::invalid_argument {
  explicit InvalidSizeError(const char* what) : std::invalid_argument(what) {}
};

struct InvalidPlanError : std::invalid_argument {
  InvalidPlanError() : std::invalid_argument("rlnc: coded slice count below source slice count") {}
};

struct InsufficientRankError : std::runtime_error {
  explicit InsufficientRankError(std::size_t got_rank, std::size_t need);
  std::size_t rank;    // rank of the received coefficient matrix
  std::size_t needed;  // k_g
};

struct GenerationEntry {
  std::size_t source_slices;  // k_g
  std::size_t coded_slices;   // n_g = ceil(k_g / rho)
};

struct GenerationPlan {
  std::vector<GenerationEntry> entries;
  std::size_t slice_bytes = 0;  // n_s
  std::size_t chunk_bytes = 0;  // n_c

  std::size_t total_source_slices() const;  // m
  std::size_t total_coded_slices() const;   // sum of n_g
};

struct CodedSlice {
  std::size_t generation_index = 0;
  std::vector<gf256::FieldElement> coeffs;  // length k_g
  std::vector<std::uint8_t> payload;        // length n_s
  bool is_systematic = false;
};

// Per-generation received/lost flags for one channel realization.
struct LossPattern {
  std::vector<std::vector<bool>> received;  // [generation][slice], length n_g each
};

// Smallest n with k/n >= rho.  The epsilon guard keeps exact ratios such
// as 8/0.5 from ceiling up one slice through floating-point noise.
std::size_t coded_slices_for(std::size_t source_slices, double code_rate);

GenerationPlan plan_generations(std::size_t chunk_bytes, std::size_t slice_bytes,
                                std::size_t gen_size, double code_rate);

// Source matrix (slice_bytes x k_g) of one generation, columns = slices,
// the chunk's trailing slice zero-padded.
gf256::FieldMatrix generation_source(std::span<const std::uint8_t> chunk,
                                     const GenerationPlan& plan, std::size_t gen_index);

// Concatenates decoded generation matrices back into chunk bytes,
// dropping the padding of the final slice.
std::vector<std::uint8_t> assemble_chunk(const GenerationPlan& plan,
                                         const std::vector<gf256::FieldMatrix>& generations);

// Systematic encode: the first k_g outputs carry the source columns with
// unit coefficient vectors; the remaining coded_count - k_g repair slices
// use seeded random coefficients (all-zero draws are redrawn).
std::vector<CodedSlice> encode_generation(const gf256::FieldMatrix& source,
                                          std::size_t coded_count, std::uint64_t seed);

// Recovers the source matrix from any subset of coded slices whose
// coefficient matrix has rank source_count; throws InsufficientRankError
// with the achieved rank otherwise.
gf256::FieldMatrix decode_generation(const std::vector<CodedSlice>& slices,
                                     std::size_t source_count);

// Monte Carlo probability that a (k, n) generation fails to decode under
// independent per-slice loss with ratio p.  Uses the true coefficient
// rank, so GF(256) rank deficiency among repair slices is counted.
double decode_failure_prob(std::size_t k, std::size_t n, double loss_ratio,
                           std::size_t trials, std::uint64_t seed);

// Incremental Gaussian elimination over received coefficient vectors;
// lets the channel simulation test decodability slice by slice.
class RankTracker {
 public:
  explicit RankTracker(std::size_t dim);

  // Reduces the column against the basis; returns true if it was
  // independent (rank grew).
  bool absorb(std::vector<gf256::FieldElement> column);
  // Fast path for a systematic slice = unit vector e_index.
  bool absorb_unit(std::size_t index);

  std::size_t rank() const { return rank_; }
  std::size_t dim() const { return dim_; }
  bool complete() const { return rank_ == dim_; }

 private:
  std::size_t dim_;
  std::size_t rank_ = 0;
  // basis_[p] is a reduced vector with leading 1 at position p, or empty.
  std::vector<std::vector<gf256::FieldElement>> basis_;
};

// Draws a nonzero random coefficient vector; shared by the encoder and
// the channel simulation so both see identical repair slices per seed.
std::vector<gf256::FieldElement> random_coefficients(std::size_t count, Rng& rng);

}  // namespace nancy::rlnc
