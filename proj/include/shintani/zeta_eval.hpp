#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "shintani/accum.hpp"
#include "shintani/errors.hpp"
#include "shintani/gamma.hpp"
#include "shintani/matrix.hpp"
#include "shintani/pole_structure.hpp"

namespace shintani {

struct EvalRequest {
  SigmaMatrix A;
  std::vector<std::complex<double>> s;
  double rel_tol = 1e-7;
  std::int64_t max_terms_per_axis = std::int64_t{1} << 20;
};

struct EvalResult {
  std::complex<double> value{0.0, 0.0};
  double error_estimate = std::numeric_limits<double>::infinity();
  std::int64_t terms_used = 0;  // lattice points in the final box
  bool converged = false;
};

namespace detail {

// Matrices whose row supports form an inclusion chain (after a column
// permutation every linear form is a prefix sum m_1 + ... + m_k) admit an
// exact regrouping of the box sum: group lattice points by the partial sums
// t_k and sweep a window over prefix tables.  Same finite term set as the
// plain box, cost O(r^2 M) instead of O(M^r).  The plan stores the exponent
// attached to each prefix length (zero when no row stops there).
struct ChainPlan {
  std::vector<std::complex<double>> e;  // index k-1 holds the exponent of t_k
};

inline std::optional<ChainPlan> chain_plan(const SigmaMatrix& A,
                                           const std::vector<std::complex<double>>& s) {
  for (double v : A.a)
    if (v != 0.0 && v != 1.0) return std::nullopt;
  if (A.cols > 64) return std::nullopt;
  std::vector<std::uint64_t> row_bits(A.rows, 0);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j)
      if (A.at(i, j) != 0.0) row_bits[i] |= std::uint64_t{1} << j;
  std::vector<int> order(A.rows);
  for (int i = 0; i < A.rows; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::popcount(row_bits[a]) < std::popcount(row_bits[b]);
  });
  for (int k = 1; k < A.rows; ++k) {
    std::uint64_t a = row_bits[order[k - 1]], b = row_bits[order[k]];
    if ((a | b) != b) return std::nullopt;
  }
  if (std::popcount(row_bits[order[A.rows - 1]]) != A.cols) return std::nullopt;

  ChainPlan plan;
  plan.e.assign(A.cols, std::complex<double>(0.0, 0.0));
  for (int i = 0; i < A.rows; ++i) plan.e[std::popcount(row_bits[i]) - 1] += s[i];
  return plan;
}

inline double pow_term(std::int64_t t, double e) {
  if (e == 0.0) return 1.0;
  return std::pow(static_cast<double>(t), -e);
}
inline std::complex<double> pow_term(std::int64_t t, std::complex<double> e) {
  if (e == std::complex<double>(0.0, 0.0)) return {1.0, 0.0};
  return std::exp(-e * std::log(static_cast<double>(t)));
}

template <class T, class E>
T chain_box_sum(const std::vector<E>& e, std::int64_t M) {
  const int r = static_cast<int>(e.size());
  if (r == 1) {
    NeumaierComplexSum acc;
    for (std::int64_t t = 1; t <= M; ++t) acc.add(pow_term(t, e[0]));
    if constexpr (std::is_same_v<T, double>)
      return acc.value().real();
    else
      return acc.value();
  }
  // prefix[idx] = F_k(lo_k - 1 + idx) over arguments [lo_k - 1, k*M],
  // lo_k = k (smallest reachable partial sum of k coordinates)
  std::vector<T> prefix(static_cast<std::size_t>(M) + 1);
  {
    NeumaierComplexSum acc;
    prefix[0] = T{};
    for (std::int64_t t = 1; t <= M; ++t) {
      acc.add(pow_term(t, e[0]));
      if constexpr (std::is_same_v<T, double>)
        prefix[static_cast<std::size_t>(t)] = acc.value().real();
      else
        prefix[static_cast<std::size_t>(t)] = acc.value();
    }
  }
  for (int k = 2; k <= r; ++k) {
    const std::int64_t lo_prev = k - 1, hi_prev = static_cast<std::int64_t>(k - 1) * M;
    const std::int64_t lo = k, hi = static_cast<std::int64_t>(k) * M;
    auto fetch = [&](std::int64_t x) -> T {
      if (x < lo_prev) return T{};
      return prefix[static_cast<std::size_t>(x - lo_prev + 1)];
    };
    if (k == r) {
      NeumaierComplexSum acc;
      for (std::int64_t t = lo; t <= hi; ++t) {
        T window = fetch(std::min(t - 1, hi_prev)) - fetch(std::max(lo_prev, t - M) - 1);
        T term = pow_term(t, e[k - 1]) * window;
        if constexpr (std::is_same_v<T, double>)
          acc.add({term, 0.0});
        else
          acc.add(term);
      }
      if constexpr (std::is_same_v<T, double>)
        return acc.value().real();
      else
        return acc.value();
    }
    std::vector<T> next(static_cast<std::size_t>(hi - lo + 2));
    NeumaierComplexSum acc;
    next[0] = T{};
    for (std::int64_t t = lo; t <= hi; ++t) {
      T window = fetch(std::min(t - 1, hi_prev)) - fetch(std::max(lo_prev, t - M) - 1);
      T term = pow_term(t, e[k - 1]) * window;
      if constexpr (std::is_same_v<T, double>)
        acc.add({term, 0.0});
      else
        acc.add(term);
      if constexpr (std::is_same_v<T, double>)
        next[static_cast<std::size_t>(t - lo + 1)] = acc.value().real();
      else
        next[static_cast<std::size_t>(t - lo + 1)] = acc.value();
    }
    prefix = std::move(next);
  }
  return T{};  // unreachable
}

// Plain lexicographic sweep of the box {1..M}^r; linear forms are maintained
// incrementally along the odometer.
template <class T, class S>
T generic_box_sum(const SigmaMatrix& A, const std::vector<S>& s, std::int64_t M) {
  const int n = A.rows, r = A.cols;
  std::vector<std::int64_t> m(r, 1);
  std::vector<double> L(n);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int j = 0; j < r; ++j) v += A.at(i, j);
    L[i] = v;
  }
  NeumaierComplexSum acc;
  while (true) {
    if constexpr (std::is_same_v<T, double>) {
      double term = 1.0;
      for (int i = 0; i < n; ++i) term *= std::pow(L[i], -s[i]);
      acc.add({term, 0.0});
    } else {
      std::complex<double> expo{0.0, 0.0};
      for (int i = 0; i < n; ++i) expo += s[i] * std::log(L[i]);
      acc.add(std::exp(-expo));
    }
    int axis = r - 1;
    while (axis >= 0) {
      if (m[axis] < M) {
        ++m[axis];
        for (int i = 0; i < n; ++i) L[i] += A.at(i, axis);
        break;
      }
      for (int i = 0; i < n; ++i) L[i] -= A.at(i, axis) * static_cast<double>(M - 1);
      m[axis] = 1;
      --axis;
    }
    if (axis < 0) break;
  }
  if constexpr (std::is_same_v<T, double>)
    return acc.value().real();
  else
    return acc.value();
}

inline std::int64_t saturated_box_count(std::int64_t M, int r) {
  std::int64_t out = 1;
  for (int k = 0; k < r; ++k) {
    if (out > std::numeric_limits<std::int64_t>::max() / M)
      return std::numeric_limits<std::int64_t>::max();
    out *= M;
  }
  return out;
}

}  // namespace detail

// Truncated series value over the box {1..M}^r with M doubled until the last
// doubling moves the partial sum by at most rel_tol * |value| (converged) or
// the per-axis cap is reached (converged = false, last partial returned).
inline EvalResult eval_zeta(const EvalRequest& req) {
  SigmaMatrix A = validate(req.A);
  if (static_cast<int>(req.s.size()) != A.rows)
    throw Error(ErrorKind::DimensionMismatch,
                "s has dimension " + std::to_string(req.s.size()) + ", expected " +
                    std::to_string(A.rows));
  if (!(req.rel_tol > 0.0) || !std::isfinite(req.rel_tol))
    throw Error(ErrorKind::InvalidParameter, "rel_tol must be positive");
  if (req.max_terms_per_axis < 32)
    throw Error(ErrorKind::InvalidParameter, "max_terms_per_axis must be at least 32");

  std::vector<double> sigma(A.rows);
  bool all_real = true;
  for (int i = 0; i < A.rows; ++i) {
    sigma[i] = req.s[i].real();
    all_real = all_real && req.s[i].imag() == 0.0;
  }
  auto report = enumerate_pole_families(A);
  if (auto bad = first_violated_constraint(report, sigma))
    throw Error(ErrorKind::OutsideConvergenceRegion,
                "Re(s) leaves the absolute-convergence region: constraint " + bad->human +
                    " fails");

  auto plan = detail::chain_plan(A, req.s);
  std::int64_t axis_cap = req.max_terms_per_axis;
  if (plan && A.cols >= 2)
    axis_cap = std::min(axis_cap, (std::int64_t{1} << 26) / (A.cols - 1));

  std::vector<double> s_re(A.rows);
  for (int i = 0; i < A.rows; ++i) s_re[i] = req.s[i].real();
  std::vector<double> e_re;
  if (plan) {
    e_re.reserve(plan->e.size());
    for (auto z : plan->e) e_re.push_back(z.real());
  }

  auto box_sum = [&](std::int64_t M) -> std::complex<double> {
    if (plan) {
      if (all_real) return {detail::chain_box_sum<double>(e_re, M), 0.0};
      return detail::chain_box_sum<std::complex<double>>(plan->e, M);
    }
    if (all_real) return {detail::generic_box_sum<double>(A, s_re, M), 0.0};
    return detail::generic_box_sum<std::complex<double>>(A, req.s, M);
  };

  std::int64_t M = 16;
  std::complex<double> S = box_sum(M);
  EvalResult out;
  while (2 * M <= axis_cap) {
    M *= 2;
    std::complex<double> S2 = box_sum(M);
    double change = std::abs(S2 - S);
    S = S2;
    out.value = S;
    out.error_estimate = change;
    out.terms_used = detail::saturated_box_count(M, A.cols);
    if (change <= req.rel_tol * std::abs(S2)) {
      out.converged = true;
      return out;
    }
  }
  if (out.terms_used == 0) {  // cap below 32: cannot happen after validation
    out.value = S;
    out.terms_used = detail::saturated_box_count(M, A.cols);
  }
  out.converged = false;
  return out;
}

// Closed form of the summed exponential kernel: product over columns of
// 1 / (e^{C_j(eps)} - 1) with C_j(eps) = sum_i a_ij eps_i.
inline double eval_kernel(const SigmaMatrix& A_in, const std::vector<double>& eps) {
  SigmaMatrix A = validate(A_in);
  if (static_cast<int>(eps.size()) != A.rows)
    throw Error(ErrorKind::DimensionMismatch,
                "eps has dimension " + std::to_string(eps.size()) + ", expected " +
                    std::to_string(A.rows));
  for (int i = 0; i < A.rows; ++i)
    if (!(eps[i] > 0.0))
      throw Error(ErrorKind::NonpositiveEpsilon,
                  "eps_" + std::to_string(i + 1) + " must be positive", {i + 1});
  double prod = 1.0;
  for (int j = 0; j < A.cols; ++j) {
    double c = 0.0;
    for (int i = 0; i < A.rows; ++i) c += A.at(i, j) * eps[i];
    prod /= std::expm1(c);
  }
  return prod;
}

struct MellinCheckResult {
  double s = 0.0;
  double lhs = 0.0;  // zeta(s) * Gamma(s)
  double rhs = 0.0;  // Mellin transform of the one-dimensional kernel
  double abs_diff = 0.0;
};

namespace detail {

template <class F>
double simpson(F f, double a, double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  NeumaierSum acc;
  acc.add(f(a));
  acc.add(f(b));
  for (int k = 1; k < intervals; ++k) acc.add(f(a + h * k) * (k % 2 ? 4.0 : 2.0));
  return acc.value() * h / 3.0;
}

}  // namespace detail

// Cross-checks zeta(s) Gamma(s) against the Mellin integral of the kernel
// eps^{s-1} / (e^eps - 1).  The [0,1] piece integrates
// eps^{s-2} (eps/(e^eps-1) - 1), whose endpoint limit is 0 for s > 1, plus
// the exact 1/(s-1); the [1,cutoff] piece is integrated directly.
inline MellinCheckResult mellin_cross_check_1d(double s, int quad_points = 10000,
                                               double cutoff = 40.0) {
  if (!(s > 1.0))
    throw Error(ErrorKind::InvalidParameter,
                "mellin check requires s > 1 (pole of zeta at s = 1)");
  if (quad_points < 8)
    throw Error(ErrorKind::InvalidParameter, "quad_points must be at least 8");
  if (!(cutoff > 1.0))
    throw Error(ErrorKind::InvalidParameter, "cutoff must exceed 1");

  EvalRequest req;
  req.A.rows = 1;
  req.A.cols = 1;
  req.A.a = {1.0};
  req.s = {std::complex<double>(s, 0.0)};
  req.rel_tol = 1e-6;
  req.max_terms_per_axis = std::int64_t{1} << 24;
  const double zeta = eval_zeta(req).value.real();
  const double lhs = zeta * gamma_fn(s);

  auto low = [s](double x) {
    if (x == 0.0) return 0.0;
    return std::pow(x, s - 2.0) * (x / std::expm1(x) - 1.0);
  };
  auto high = [s](double x) { return std::pow(x, s - 1.0) / std::expm1(x); };
  const double rhs = detail::simpson(low, 0.0, 1.0, quad_points) + 1.0 / (s - 1.0) +
                     detail::simpson(high, 1.0, cutoff, quad_points);

  MellinCheckResult out;
  out.s = s;
  out.lhs = lhs;
  out.rhs = rhs;
  out.abs_diff = std::abs(lhs - rhs);
  return out;
}

}  // namespace shintani
