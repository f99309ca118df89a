#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "shintani/errors.hpp"
#include "shintani/flow.hpp"
#include "shintani/matrix.hpp"

namespace shintani {

// Feasibility tolerance for flow-value comparisons.
inline constexpr double kFlowTol = 1e-9;

namespace detail {

inline std::vector<int> checked_subset(const SigmaMatrix& A, std::vector<int> J) {
  validate(A);
  if (J.empty()) throw Error(ErrorKind::EmptySubset, "column subset is empty");
  std::sort(J.begin(), J.end());
  for (std::size_t k = 0; k < J.size(); ++k) {
    if (J[k] < 0 || J[k] >= A.cols)
      throw Error(ErrorKind::BadInput,
                  "column index " + std::to_string(J[k] + 1) + " out of range", {J[k] + 1});
    if (k > 0 && J[k] == J[k - 1])
      throw Error(ErrorKind::BadInput,
                  "column index " + std::to_string(J[k] + 1) + " repeated", {J[k] + 1});
  }
  return J;
}

// canonical double in [0,1) from a raw 64-bit draw; keeps sampling
// reproducible independent of the standard library's distributions
inline double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Membership oracle for the Newton polyhedron of a fixed column subset J,
// answered by transportation feasibility: sigma lies in the closed polyhedron
// iff unit supplies for the columns of J can be routed into coordinate
// capacities sigma_i along support edges.  Strict membership shrinks sigma by
// a uniform delta: the polyhedron is open in the positive orthant, and sigma
// is interior iff sigma - delta*1 stays feasible for some delta > 0.  That
// delta is searched by halving from an upper bound; since feasibility is
// monotone in delta, the search accepts exactly when its smallest probe
// delta_min = upper * 2^-30 is feasible, so only that probe is solved.
class MembershipOracle {
 public:
  MembershipOracle(const SigmaMatrix& A, const std::vector<int>& J) {
    J_ = detail::checked_subset(A, J);
    n_ = A.rows;
    auto all = column_supports(A);
    std::vector<SupportVector> sub;
    sub.reserve(J_.size());
    for (int j : J_) sub.push_back(all[j]);
    solver_.set_structure(n_, sub);
    target_ = static_cast<double>(J_.size());
  }

  int dim() const { return n_; }
  const std::vector<int>& subset() const { return J_; }

  bool closed(const std::vector<double>& sigma) {
    check_dim(sigma);
    for (double v : sigma)
      if (v < 0.0) return false;
    return solver_.solve(sigma) >= target_ - kFlowTol;
  }

  bool strict(const std::vector<double>& sigma) {
    check_dim(sigma);
    double lo = sigma[0];
    for (double v : sigma) lo = std::min(lo, v);
    if (!(lo > 0.0)) return false;
    const double delta_min = std::ldexp(std::min(lo, 1e-2), -30);
    return solver_.solve(sigma, delta_min) >= target_ - kFlowTol;
  }

 private:
  void check_dim(const std::vector<double>& sigma) const {
    if (static_cast<int>(sigma.size()) != n_)
      throw Error(ErrorKind::DimensionMismatch,
                  "sigma has dimension " + std::to_string(sigma.size()) + ", expected " +
                      std::to_string(n_));
  }

  std::vector<int> J_;
  int n_ = 0;
  double target_ = 0.0;
  FlowSolver solver_;
};

inline bool membership_flow(const SigmaMatrix& A, const std::vector<int>& J,
                            const std::vector<double>& sigma, bool strict) {
  MembershipOracle oracle(A, J);
  return strict ? oracle.strict(sigma) : oracle.closed(sigma);
}

// One constraint <normal, sigma> > rhs.  Positivity constraints sigma_i > 0
// carry rhs = 0 and are flagged so reports can omit them.
struct Halfspace {
  SupportVector normal;
  int rhs = 0;
  bool positivity = false;
};

struct HalfspaceSystem {
  int n = 0;
  std::vector<Halfspace> constraints;

  bool strictly_contains(const std::vector<double>& sigma) const {
    for (const auto& c : constraints)
      if (!(c.normal.dot(sigma) > static_cast<double>(c.rhs))) return false;
    return true;
  }

  // smallest distance (in constraint value) from sigma to any hyperplane
  double min_abs_slack(const std::vector<double>& sigma) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints)
      best = std::min(best, std::abs(c.normal.dot(sigma) - static_cast<double>(c.rhs)));
    return best;
  }
};

// Facet description of the Newton polyhedron of the subset J: one constraint
// <mu_K, sigma> > |K| per non-empty K subseteq J (mu_K = union of column
// supports), deduplicated keeping the largest |K| per distinct normal, plus
// the positive orthant.  Facets are sorted by support size, then
// lexicographically.
inline HalfspaceSystem halfspace_description(const SigmaMatrix& A, const std::vector<int>& J,
                                             int subset_cap = kDefaultSubsetCap) {
  auto Js = detail::checked_subset(A, J);
  const int q = static_cast<int>(Js.size());
  if (q > subset_cap)
    throw Error(ErrorKind::SubsetCapExceeded,
                "subset of size " + std::to_string(q) + " exceeds cap " +
                    std::to_string(subset_cap),
                {q, subset_cap});
  auto supports = column_supports(A);

  std::unordered_map<std::uint64_t, int> best;  // union bits -> max |K|
  std::vector<std::uint64_t> union_bits(std::uint64_t{1} << q, 0);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << q); ++mask) {
    int low = std::countr_zero(mask);
    union_bits[mask] = union_bits[mask & (mask - 1)] | supports[Js[low]].bits();
    int size = std::popcount(mask);
    auto [it, inserted] = best.emplace(union_bits[mask], size);
    if (!inserted && size > it->second) it->second = size;
  }

  HalfspaceSystem sys;
  sys.n = A.rows;
  for (const auto& [bits, size] : best) {
    Halfspace h;
    h.normal = SupportVector(A.rows);
    for (std::uint64_t b = bits; b != 0; b &= b - 1) h.normal.set(std::countr_zero(b));
    h.rhs = size;
    sys.constraints.push_back(h);
  }
  std::sort(sys.constraints.begin(), sys.constraints.end(), [](const Halfspace& a, const Halfspace& b) {
    if (a.normal.count() != b.normal.count()) return a.normal.count() < b.normal.count();
    return SupportVector::lex_less(a.normal, b.normal);
  });
  for (int i = 0; i < A.rows; ++i) {
    Halfspace h;
    h.normal = SupportVector(A.rows);
    h.normal.set(i);
    h.rhs = 0;
    h.positivity = true;
    sys.constraints.push_back(h);
  }
  return sys;
}

struct VerifyReport {
  int samples = 0;    // requested sample count
  int agree = 0;      // both oracles matched
  int ambiguous = 0;  // discarded: within 1e-9 of some constraint
  std::vector<std::vector<double>> disagree;
};

// Cross-checks the flow oracle against the halfspace description on sampled
// points: half uniform over [0, 2|J|]^n, half perturbed within 1e-3 of a
// facet hyperplane.  Points within 1e-9 of any constraint are discarded as
// numerically ambiguous.
inline VerifyReport verify_polyhedron_equality(const SigmaMatrix& A, const std::vector<int>& J,
                                               int sample_count, std::uint64_t seed,
                                               int subset_cap = kDefaultSubsetCap) {
  auto sys = halfspace_description(A, J, subset_cap);
  MembershipOracle oracle(A, J);
  const int n = A.rows;
  const double box = 2.0 * static_cast<double>(J.size());

  int facet_count = 0;
  for (const auto& c : sys.constraints)
    if (!c.positivity) ++facet_count;

  std::mt19937_64 rng(seed);
  VerifyReport rep;
  rep.samples = sample_count;
  std::vector<double> p(n);
  for (int k = 0; k < sample_count; ++k) {
    for (int i = 0; i < n; ++i) p[i] = box * detail::canonical(rng);
    if (k % 2 == 1 && facet_count > 0) {
      const auto& c = sys.constraints[(k / 2) % facet_count];
      const double cnt = static_cast<double>(c.normal.count());
      const double shift = (static_cast<double>(c.rhs) - c.normal.dot(p)) / cnt;
      const double u = (2.0 * detail::canonical(rng) - 1.0) * 1e-3;
      const double step = shift + u / std::sqrt(cnt);
      for (int i = 0; i < n; ++i)
        if (c.normal.test(i)) p[i] += step;
    }
    if (sys.min_abs_slack(p) < 1e-9) {
      ++rep.ambiguous;
      continue;
    }
    bool by_flow = oracle.strict(p);
    bool by_halfspace = sys.strictly_contains(p);
    if (by_flow == by_halfspace)
      ++rep.agree;
    else
      rep.disagree.push_back(p);
  }
  std::sort(rep.disagree.begin(), rep.disagree.end());
  return rep;
}

}  // namespace shintani
