#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Arithmetic and dense linear algebra over GF(2^8) with the reduction
// polynomial x^8 + x^4 + x^3 + x + 1 (0x11B).  Addition is XOR; products
// go through 256-entry log / 512-entry antilog tables built once at
// startup from the generator 0x03.
namespace nancy::gf256 {

using FieldElement = std::uint8_t;

inline constexpr std::uint16_t kReductionPoly = 0x11B;
inline constexpr FieldElement kGenerator = 0x03;

struct ZeroInverseError : std::domain_error {
  ZeroInverseError() : std::domain_error("gf256: zero has no multiplicative inverse") {}
};

struct SingularMatrixError : std::domain_error {
  SingularMatrixError() : std::domain_error("gf256: matrix is singular") {}
};

struct ShapeError : std::invalid_argument {
  explicit ShapeError(const char* what) : std::invalid_argument(what) {}
};

FieldElement mul(FieldElement a, FieldElement b);
FieldElement inv(FieldElement a);

inline FieldElement add(FieldElement a, FieldElement b) {
  return static_cast<FieldElement>(a ^ b);
}

// Dense row-major matrix of field elements.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static FieldMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElement& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  FieldElement at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  FieldElement* row(std::size_t r) { return data_.data() + r * cols_; }
  const FieldElement* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<FieldElement> column(std::size_t c) const;
  void set_column(std::size_t c, const std::vector<FieldElement>& v);

  bool operator==(const FieldMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FieldElement> data_;
};

FieldMatrix matmul(const FieldMatrix& a, const FieldMatrix& b);

// Matrix-vector product a * x for x of length a.cols().
std::vector<FieldElement> matvec(const FieldMatrix& a, const std::vector<FieldElement>& x);

// Rank by Gaussian elimination with partial pivoting (first nonzero entry
// in the column, lowest row index wins).  Returns 0 for an empty matrix.
std::size_t rank(FieldMatrix m);

// Inverse of a square matrix by Gauss-Jordan elimination.
// Throws SingularMatrixError when rank(a) < a.rows().
FieldMatrix invert(const FieldMatrix& a);

// Solves X * a = y for X, with a square and full rank and y.cols() == a.rows().
// Columns of y correspond to columns of a.
FieldMatrix solve(const FieldMatrix& a, const FieldMatrix& y);

}  // namespace nancy::gf256
