#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shintani/errors.hpp"
#include "shintani/matrix.hpp"
#include "shintani/polyhedra.hpp"

namespace shintani {

// Union of the column supports over J: the facet normal attached to J.
inline SupportVector mu_vector(const SigmaMatrix& A, const std::vector<int>& J) {
  auto Js = detail::checked_subset(A, J);
  auto supports = column_supports(A);
  SupportVector mu(A.rows);
  for (int j : Js) mu = mu | supports[j];
  return mu;
}

// One family of candidate pole hyperplanes <mu, s> = nu - l.  Basis normals
// (|Supp(mu)| = 1) only carry poles for l in {0, ..., nu-1}; all other
// normals get every l >= 0.
struct PoleFamily {
  SupportVector mu;
  int nu = 0;
  bool l_all = true;
  std::vector<std::vector<int>> witnesses;  // 0-based column subsets, sorted
};

struct ConvergenceConstraint {
  SupportVector mu;
  int rhs = 0;
};

struct PoleReport {
  int n = 0;
  int r = 0;
  std::vector<PoleFamily> families;
  // strict halfspaces <mu, sigma> > rhs cutting out the convergence region
  // (together with the implicit positivity sigma_i > 0)
  std::vector<ConvergenceConstraint> convergence;
};

// Enumerates every non-empty column subset J, groups them by the normal
// mu_J, and keeps nu = max |J| per normal.  Families are sorted by support
// size then lexicographically; witnesses by size then entries.
inline PoleReport enumerate_pole_families(const SigmaMatrix& A,
                                          int subset_cap = kDefaultSubsetCap) {
  validate(A);
  if (A.cols > subset_cap)
    throw Error(ErrorKind::SubsetCapExceeded,
                "matrix has " + std::to_string(A.cols) + " columns, cap is " +
                    std::to_string(subset_cap),
                {A.cols, subset_cap});
  auto supports = column_supports(A);
  const int r = A.cols;

  struct Group {
    int nu = 0;
    std::vector<std::vector<int>> witnesses;
  };
  std::map<std::uint64_t, Group> groups;
  std::vector<std::uint64_t> union_bits(std::uint64_t{1} << r, 0);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << r); ++mask) {
    int low = std::countr_zero(mask);
    union_bits[mask] = union_bits[mask & (mask - 1)] | supports[low].bits();
    auto& g = groups[union_bits[mask]];
    g.nu = std::max(g.nu, std::popcount(mask));
    std::vector<int> witness;
    for (std::uint64_t b = mask; b != 0; b &= b - 1) witness.push_back(std::countr_zero(b));
    g.witnesses.push_back(std::move(witness));
  }

  PoleReport rep;
  rep.n = A.rows;
  rep.r = r;
  for (auto& [bits, g] : groups) {
    PoleFamily f;
    f.mu = SupportVector(A.rows);
    for (std::uint64_t b = bits; b != 0; b &= b - 1) f.mu.set(std::countr_zero(b));
    f.nu = g.nu;
    f.l_all = f.mu.count() != 1;
    std::sort(g.witnesses.begin(), g.witnesses.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                if (a.size() != b.size()) return a.size() < b.size();
                return a < b;
              });
    f.witnesses = std::move(g.witnesses);
    rep.families.push_back(std::move(f));
  }
  std::sort(rep.families.begin(), rep.families.end(), [](const PoleFamily& a, const PoleFamily& b) {
    if (a.mu.count() != b.mu.count()) return a.mu.count() < b.mu.count();
    return SupportVector::lex_less(a.mu, b.mu);
  });
  rep.convergence.reserve(rep.families.size());
  for (const auto& f : rep.families) rep.convergence.push_back({f.mu, f.nu});
  return rep;
}

struct ViolatedConstraint {
  SupportVector mu;
  int rhs = 0;
  std::string human;
};

// First convergence constraint sigma fails: positivity in coordinate order,
// then the family constraints in report order.  Empty when sigma is interior.
inline std::optional<ViolatedConstraint> first_violated_constraint(
    const PoleReport& rep, const std::vector<double>& sigma) {
  if (static_cast<int>(sigma.size()) != rep.n)
    throw Error(ErrorKind::DimensionMismatch,
                "sigma has dimension " + std::to_string(sigma.size()) + ", expected " +
                    std::to_string(rep.n));
  for (int i = 0; i < rep.n; ++i) {
    if (!(sigma[i] > 0.0)) {
      ViolatedConstraint v;
      v.mu = SupportVector(rep.n);
      v.mu.set(i);
      v.rhs = 0;
      v.human = "sigma_" + std::to_string(i + 1) + " > 0";
      return v;
    }
  }
  for (const auto& c : rep.convergence) {
    if (!(c.mu.dot(sigma) > static_cast<double>(c.rhs))) {
      ViolatedConstraint v;
      v.mu = c.mu;
      v.rhs = c.rhs;
      std::string expr;
      for (int i = 0; i < rep.n; ++i)
        if (c.mu.test(i)) {
          if (!expr.empty()) expr += " + ";
          expr += "sigma_" + std::to_string(i + 1);
        }
      v.human = expr + " > " + std::to_string(c.rhs);
      return v;
    }
  }
  return std::nullopt;
}

// sigma lies in the open absolute-convergence region
inline bool convergence_check(const PoleReport& rep, const std::vector<double>& sigma) {
  return !first_violated_constraint(rep, sigma).has_value();
}

inline bool convergence_check(const SigmaMatrix& A, const std::vector<double>& sigma,
                              int subset_cap = kDefaultSubsetCap) {
  return convergence_check(enumerate_pole_families(A, subset_cap), sigma);
}

// Simple sufficient box: sigma_i > r for every i guarantees convergence.
inline bool sufficient_box_check(const SigmaMatrix& A, const std::vector<double>& sigma) {
  validate(A);
  if (static_cast<int>(sigma.size()) != A.rows)
    throw Error(ErrorKind::DimensionMismatch,
                "sigma has dimension " + std::to_string(sigma.size()) + ", expected " +
                    std::to_string(A.rows));
  for (double v : sigma)
    if (!(v > static_cast<double>(A.cols))) return false;
  return true;
}

struct TransformedFamily {
  std::vector<double> normal;
  int nu = 0;
  bool l_all = true;
};

// Change of variables s -> B^T s: each pole hyperplane <mu, s> = nu - l turns
// into <B^T mu, s> = nu - l.  B is n x n row-major and must be invertible.
inline std::vector<TransformedFamily> transform_pole_families(const PoleReport& rep,
                                                              const std::vector<double>& B) {
  const int n = rep.n;
  if (static_cast<int>(B.size()) != n * n)
    throw Error(ErrorKind::DimensionMismatch,
                "transform must be " + std::to_string(n) + "x" + std::to_string(n));
  // Gaussian elimination with partial pivoting, determinant check only
  std::vector<double> w(B);
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(w[i * n + c]) > std::abs(w[piv * n + c])) piv = i;
    if (std::abs(w[piv * n + c]) < 1e-12)
      throw Error(ErrorKind::InvalidParameter, "transform matrix is singular");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(w[piv * n + j], w[c * n + j]);
      det = -det;
    }
    det *= w[c * n + c];
    for (int i = c + 1; i < n; ++i) {
      double f = w[i * n + c] / w[c * n + c];
      for (int j = c; j < n; ++j) w[i * n + j] -= f * w[c * n + j];
    }
  }
  (void)det;

  std::vector<TransformedFamily> out;
  out.reserve(rep.families.size());
  for (const auto& f : rep.families) {
    TransformedFamily t;
    t.nu = f.nu;
    t.l_all = f.l_all;
    t.normal.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        if (f.mu.test(k)) v += B[static_cast<std::size_t>(k) * n + i];
      t.normal[i] = v;
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace shintani
