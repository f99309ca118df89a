#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "shintani/errors.hpp"

namespace shintani {

// Default cap on subset enumeration (2^cap subsets).  Overridable per call and
// via SHINTANI_SUBSET_CAP in the CLI.
inline constexpr int kDefaultSubsetCap = 20;

// 0/1 vector in {0,1}^n, the coordinate support of a collection of columns.
// Bitset-backed; dimensions up to 64 (well past desk scale).
class SupportVector {
 public:
  SupportVector() = default;
  explicit SupportVector(int n) : n_(n) {
    if (n < 1 || n > 64)
      throw Error(ErrorKind::InvalidParameter,
                  "support vector dimension must be in [1, 64], got " +
                      std::to_string(n));
  }

  int dim() const { return n_; }
  bool test(int i) const { return (bits_ >> i) & 1u; }
  void set(int i) { bits_ |= std::uint64_t{1} << i; }
  int count() const { return std::popcount(bits_); }
  std::uint64_t bits() const { return bits_; }

  SupportVector operator|(const SupportVector& o) const {
    SupportVector r(*this);
    r.bits_ |= o.bits_;
    return r;
  }
  bool operator==(const SupportVector& o) const {
    return n_ == o.n_ && bits_ == o.bits_;
  }
  bool operator!=(const SupportVector& o) const { return !(*this == o); }

  // sum of sigma over the support
  double dot(const std::vector<double>& sigma) const {
    double s = 0.0;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1)
      s += sigma[std::countr_zero(b)];
    return s;
  }

  std::vector<int> to_01() const {
    std::vector<int> v(n_);
    for (int i = 0; i < n_; ++i) v[i] = test(i) ? 1 : 0;
    return v;
  }

  // bitset order: coordinate 1 is the lowest bit, so (1,1,0) sorts before
  // (0,1,1) — the order reference tables list constraints in
  static bool lex_less(const SupportVector& a, const SupportVector& b) {
    if (a.bits_ != b.bits_) return a.bits_ < b.bits_;
    return a.n_ < b.n_;
  }

 private:
  int n_ = 0;
  std::uint64_t bits_ = 0;
};

// Nonnegative n x r matrix with at least one positive entry in every row and
// column.  Rows index the linear forms, columns the summation variables.
struct SigmaMatrix {
  int rows = 0;  // n
  int cols = 0;  // r
  std::vector<double> a;  // row-major, size rows*cols

  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
};

// Checks shape and the row/column positivity requirements.  Throws on the
// first offending entry (row-major scan), then empty rows, then empty columns.
// Index payloads are 1-based.
inline const SigmaMatrix& validate(const SigmaMatrix& m) {
  if (m.rows < 1 || m.cols < 1)
    throw Error(ErrorKind::BadInput, "matrix must have at least one row and one column");
  if (m.a.size() != static_cast<std::size_t>(m.rows) * m.cols)
    throw Error(ErrorKind::DimensionMismatch,
                "entry count " + std::to_string(m.a.size()) + " does not match " +
                    std::to_string(m.rows) + "x" + std::to_string(m.cols));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (m.at(i, j) < 0.0)
        throw Error(ErrorKind::NegativeEntry,
                    "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") is negative",
                    {i + 1, j + 1});
  for (int i = 0; i < m.rows; ++i) {
    bool any = false;
    for (int j = 0; j < m.cols; ++j) any = any || m.at(i, j) > 0.0;
    if (!any)
      throw Error(ErrorKind::ZeroRow, "row " + std::to_string(i + 1) + " has no positive entry",
                  {i + 1});
  }
  for (int j = 0; j < m.cols; ++j) {
    bool any = false;
    for (int i = 0; i < m.rows; ++i) any = any || m.at(i, j) > 0.0;
    if (!any)
      throw Error(ErrorKind::ZeroColumn,
                  "column " + std::to_string(j + 1) + " has no positive entry", {j + 1});
  }
  return m;
}

// 0/1 zero-pattern of A.  Shares the support structure, hence the same
// polyhedra, pole families and convergence region.
inline SigmaMatrix skeleton(const SigmaMatrix& m) {
  SigmaMatrix s;
  s.rows = m.rows;
  s.cols = m.cols;
  s.a.resize(m.a.size());
  for (std::size_t k = 0; k < m.a.size(); ++k) s.a[k] = m.a[k] > 0.0 ? 1.0 : 0.0;
  return s;
}

// Supp(mu_j) for every column j: the rows where column j is positive.
inline std::vector<SupportVector> column_supports(const SigmaMatrix& m) {
  std::vector<SupportVector> out;
  out.reserve(m.cols);
  for (int j = 0; j < m.cols; ++j) {
    SupportVector v(m.rows);
    for (int i = 0; i < m.rows; ++i)
      if (m.at(i, j) > 0.0) v.set(i);
    out.push_back(v);
  }
  return out;
}

// Builds the n x (m+1) 0/1 matrix whose first m columns are the given
// supports and whose last column is all ones.  Every support must contain at
// least two coordinates.
inline SigmaMatrix matrix_from_supports(int n, const std::vector<SupportVector>& supports) {
  if (n < 1 || n > 64)
    throw Error(ErrorKind::InvalidParameter, "dimension must be in [1, 64]");
  const int m = static_cast<int>(supports.size());
  for (int j = 0; j < m; ++j) {
    if (supports[j].dim() != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "support " + std::to_string(j + 1) + " has dimension " +
                      std::to_string(supports[j].dim()) + ", expected " + std::to_string(n),
                  {j + 1});
    if (supports[j].count() < 2)
      throw Error(ErrorKind::SupportTooSmall,
                  "support " + std::to_string(j + 1) + " has fewer than two coordinates",
                  {j + 1});
  }
  SigmaMatrix out;
  out.rows = n;
  out.cols = m + 1;
  out.a.assign(static_cast<std::size_t>(n) * (m + 1), 0.0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      if (supports[j].test(i)) out.at(i, j) = 1.0;
  for (int i = 0; i < n; ++i) out.at(i, m) = 1.0;
  return out;
}

}  // namespace shintani
