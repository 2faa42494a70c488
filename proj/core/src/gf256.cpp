#include "nancy/gf256.hpp"

#include <array>
#include <utility>

namespace nancy::gf256 {

namespace {

struct Tables {
  // antilog[i] = g^i for i in [0, 509]; duplicated upper half so that
  // mul never needs a mod-255 reduction.
  std::array<FieldElement, 512> antilog{};
  std::array<std::uint8_t, 256> log{};

  Tables() {
    std::uint16_t x = 1;
    for (int i = 0; i < 255; ++i) {
      antilog[i] = static_cast<FieldElement>(x);
      log[x] = static_cast<std::uint8_t>(i);
      // x <- x * 0x03 = x XOR (x << 1), reduced mod 0x11B
      std::uint16_t doubled = static_cast<std::uint16_t>(x << 1);
      if (doubled & 0x100) doubled ^= kReductionPoly;
      x ^= doubled;
    }
    for (int i = 255; i < 512; ++i) {
      antilog[i] = antilog[i - 255];
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

FieldElement mul(FieldElement a, FieldElement b) {
  if (a == 0 || b == 0) return 0;
  const Tables& t = tables();
  return t.antilog[t.log[a] + t.log[b]];
}

FieldElement inv(FieldElement a) {
  if (a == 0) throw ZeroInverseError();
  const Tables& t = tables();
  return t.antilog[255 - t.log[a]];
}

FieldMatrix FieldMatrix::identity(std::size_t n) {
  FieldMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

std::vector<FieldElement> FieldMatrix::column(std::size_t c) const {
  std::vector<FieldElement> v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = at(r, c);
  return v;
}

void FieldMatrix::set_column(std::size_t c, const std::vector<FieldElement>& v) {
  for (std::size_t r = 0; r < rows_; ++r) at(r, c) = v[r];
}

FieldMatrix matmul(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("gf256::matmul: inner dimensions differ");
  FieldMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const FieldElement aik = a.at(i, k);
      if (aik == 0) continue;
      const FieldElement* brow = b.row(k);
      FieldElement* orow = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        orow[j] = add(orow[j], mul(aik, brow[j]));
      }
    }
  }
  return out;
}

std::vector<FieldElement> matvec(const FieldMatrix& a, const std::vector<FieldElement>& x) {
  if (a.cols() != x.size()) throw ShapeError("gf256::matvec: dimension mismatch");
  std::vector<FieldElement> out(a.rows(), 0);
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const FieldElement xk = x[k];
    if (xk == 0) continue;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      out[i] = add(out[i], mul(a.at(i, k), xk));
    }
  }
  return out;
}

std::size_t rank(FieldMatrix m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && m.at(pivot, c) == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != r) {
      for (std::size_t j = c; j < cols; ++j) std::swap(m.at(r, j), m.at(pivot, j));
    }
    const FieldElement scale = inv(m.at(r, c));
    for (std::size_t j = c; j < cols; ++j) m.at(r, j) = mul(m.at(r, j), scale);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const FieldElement f = m.at(i, c);
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) {
        m.at(i, j) = add(m.at(i, j), mul(f, m.at(r, j)));
      }
    }
    ++r;
  }
  return r;
}

FieldMatrix invert(const FieldMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("gf256::invert: matrix not square");
  const std::size_t n = a.rows();
  FieldMatrix work = a;
  FieldMatrix out = FieldMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && work.at(pivot, c) == 0) ++pivot;
    if (pivot == n) throw SingularMatrixError();
    if (pivot != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work.at(c, j), work.at(pivot, j));
        std::swap(out.at(c, j), out.at(pivot, j));
      }
    }
    const FieldElement scale = inv(work.at(c, c));
    for (std::size_t j = 0; j < n; ++j) {
      work.at(c, j) = mul(work.at(c, j), scale);
      out.at(c, j) = mul(out.at(c, j), scale);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const FieldElement f = work.at(i, c);
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work.at(i, j) = add(work.at(i, j), mul(f, work.at(c, j)));
        out.at(i, j) = add(out.at(i, j), mul(f, out.at(c, j)));
      }
    }
  }
  return out;
}

FieldMatrix solve(const FieldMatrix& a, const FieldMatrix& y) {
  if (a.rows() != a.cols()) throw ShapeError("gf256::solve: coefficient matrix not square");
  if (y.cols() != a.rows()) throw ShapeError("gf256::solve: y.cols() != a.rows()");
  return matmul(y, invert(a));
}

}  // namespace nancy::gf256
