#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "shintani/errors.hpp"
#include "shintani/flow.hpp"
#include "shintani/matrix.hpp"

namespace shintani {

// Bound comparisons: met when >= bound - kHallTol (non-strict) or
// > bound + kHallTol (strict).  Transfers below kMassTol are treated as zero.
inline constexpr double kHallTol = 1e-9;
inline constexpr double kMassTol = 1e-12;

// Weights sigma over n coordinates to be split among sets S_1..S_m so that
// part j carries total weight >= 1 on S_j (strictly > 1, with all entries
// positive, in the strict variant).
struct WeightInstance {
  int n = 0;
  std::vector<std::vector<int>> sets;  // 0-based coordinate indices
  std::vector<double> sigma;
  bool strict = false;
};

using Decomposition = std::vector<std::vector<double>>;

inline WeightInstance validate_instance(WeightInstance inst) {
  if (inst.n < 1 || inst.n > 64)
    throw Error(ErrorKind::BadInput, "coordinate count must be in [1, 64]");
  if (inst.sets.empty()) throw Error(ErrorKind::BadInput, "instance has no sets");
  for (std::size_t j = 0; j < inst.sets.size(); ++j) {
    auto& S = inst.sets[j];
    if (S.empty())
      throw Error(ErrorKind::EmptySubset, "set " + std::to_string(j + 1) + " is empty",
                  {static_cast<int>(j + 1)});
    std::sort(S.begin(), S.end());
    for (std::size_t k = 0; k < S.size(); ++k) {
      if (S[k] < 0 || S[k] >= inst.n)
        throw Error(ErrorKind::BadInput,
                    "set " + std::to_string(j + 1) + " contains out-of-range index " +
                        std::to_string(S[k] + 1),
                    {static_cast<int>(j + 1), S[k] + 1});
      if (k > 0 && S[k] == S[k - 1])
        throw Error(ErrorKind::BadInput,
                    "set " + std::to_string(j + 1) + " repeats index " + std::to_string(S[k] + 1),
                    {static_cast<int>(j + 1), S[k] + 1});
    }
  }
  if (static_cast<int>(inst.sigma.size()) != inst.n)
    throw Error(ErrorKind::DimensionMismatch,
                "sigma has dimension " + std::to_string(inst.sigma.size()) + ", expected " +
                    std::to_string(inst.n));
  for (int i = 0; i < inst.n; ++i) {
    if (inst.sigma[i] < 0.0)
      throw Error(ErrorKind::NegativeEntry, "sigma_" + std::to_string(i + 1) + " is negative",
                  {i + 1});
    if (inst.strict && !(inst.sigma[i] > 0.0))
      throw Error(ErrorKind::InvalidParameter,
                  "strict instance requires positive weights, sigma_" + std::to_string(i + 1) +
                      " is zero",
                  {i + 1});
  }
  return inst;
}

// 0/1 matrix whose column j is the indicator of S_j.  Not run through
// validate(): a coordinate covered by no set yields a zero row, which is fine
// here but is not a valid Shintani matrix.
inline SigmaMatrix characteristic_matrix(const WeightInstance& inst) {
  SigmaMatrix A;
  A.rows = inst.n;
  A.cols = static_cast<int>(inst.sets.size());
  A.a.assign(static_cast<std::size_t>(A.rows) * A.cols, 0.0);
  for (int j = 0; j < A.cols; ++j)
    for (int i : inst.sets[j]) A.at(i, j) = 1.0;
  return A;
}

struct IntersectionGraph {
  int m = 0;
  std::vector<char> adj;  // m*m, symmetric, no self loops

  bool edge(int u, int v) const { return adj[static_cast<std::size_t>(u) * m + v] != 0; }

  static IntersectionGraph build(const std::vector<std::vector<int>>& sets) {
    IntersectionGraph g;
    g.m = static_cast<int>(sets.size());
    g.adj.assign(static_cast<std::size_t>(g.m) * g.m, 0);
    std::vector<std::uint64_t> bits(g.m, 0);
    for (int j = 0; j < g.m; ++j)
      for (int i : sets[j]) bits[j] |= std::uint64_t{1} << i;
    for (int u = 0; u < g.m; ++u)
      for (int v = u + 1; v < g.m; ++v)
        if (bits[u] & bits[v]) {
          g.adj[static_cast<std::size_t>(u) * g.m + v] = 1;
          g.adj[static_cast<std::size_t>(v) * g.m + u] = 1;
        }
    return g;
  }
};

struct HallResult {
  bool feasible = false;
  double slack = 0.0;             // min over non-empty K of (weight of union - |K|)
  std::vector<int> violating_K;   // 0-based set indices; filled when infeasible
};

namespace detail {

inline std::vector<std::uint64_t> set_bits(const WeightInstance& inst) {
  std::vector<std::uint64_t> bits(inst.sets.size(), 0);
  for (std::size_t j = 0; j < inst.sets.size(); ++j)
    for (int i : inst.sets[j]) bits[j] |= std::uint64_t{1} << i;
  return bits;
}

inline double union_weight(std::uint64_t bits, const std::vector<double>& sigma) {
  double s = 0.0;
  for (std::uint64_t b = bits; b != 0; b &= b - 1) s += sigma[std::countr_zero(b)];
  return s;
}

inline HallResult hall_exhaustive(const WeightInstance& inst) {
  const int m = static_cast<int>(inst.sets.size());
  auto bits = set_bits(inst);
  std::vector<std::uint64_t> unions(std::uint64_t{1} << m, 0);
  HallResult r;
  r.slack = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 1;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    unions[mask] = unions[mask & (mask - 1)] | bits[std::countr_zero(mask)];
    double slack = union_weight(unions[mask], inst.sigma) - std::popcount(mask);
    if (slack < r.slack) {
      r.slack = slack;
      best_mask = mask;
    }
  }
  r.feasible = inst.strict ? r.slack > kHallTol : r.slack >= -kHallTol;
  if (!r.feasible)
    for (std::uint64_t b = best_mask; b != 0; b &= b - 1)
      r.violating_K.push_back(std::countr_zero(b));
  return r;
}

// Minimum over non-empty K of slack(K) as a min-cut: forcing set k0 onto the
// source side of the transportation network makes the minimum cut equal
// m + min over K containing k0 of slack(K); take the best k0.
inline HallResult hall_mincut(const WeightInstance& inst) {
  const int m = static_cast<int>(inst.sets.size());
  std::vector<SupportVector> sup(m, SupportVector(inst.n));
  for (int j = 0; j < m; ++j)
    for (int i : inst.sets[j]) sup[j].set(i);
  FlowSolver solver;
  solver.set_structure(inst.n, sup);
  HallResult r;
  r.slack = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k < m; ++k) {
    double slack = solver.solve(inst.sigma, 0.0, k) - static_cast<double>(m);
    if (slack < r.slack) {
      r.slack = slack;
      best_k = k;
    }
  }
  r.feasible = inst.strict ? r.slack > kHallTol : r.slack >= -kHallTol;
  if (!r.feasible) {
    solver.solve(inst.sigma, 0.0, best_k);
    for (int j = 0; j < m; ++j)
      if (solver.left_reachable(j)) r.violating_K.push_back(j);
  }
  return r;
}

}  // namespace detail

// Hall-type feasibility: every non-empty family K of sets must jointly cover
// weight >= |K|.  Exhaustive subset scan for m <= 20 unless min-cut mode is
// forced; both modes report the same minimal slack.
inline HallResult check_hall_condition(const WeightInstance& inst, bool force_mincut = false) {
  auto v = validate_instance(inst);
  if (!force_mincut && v.sets.size() <= 20) return detail::hall_exhaustive(v);
  return detail::hall_mincut(v);
}

namespace detail {

inline double set_sum(const std::vector<double>& part, const std::vector<int>& S) {
  double s = 0.0;
  for (int i : S) s += part[i];
  return s;
}

// Statistics collected while the graph constructor runs; used by tests to
// watch conservation drift.
struct RedistributionStats {
  double max_conservation_drift = 0.0;
  int sweeps = 0;
  int cuts = 0;
};

// Moves weight toward the newest part (index t = k-1) along shortest paths of
// the intersection graph until it reaches total 1 on its set.  Vertices of
// equal distance are visited in increasing index order, shortest paths are
// enumerated lexicographically, and coordinate transfers are greedy in
// increasing coordinate order.  An edge whose shared weight is exhausted is
// cut and distances are recomputed.  A sweep cap keeps the loop finite.
inline void redistribute_to_last(const std::vector<std::vector<int>>& sets,
                                 std::vector<std::vector<double>>& parts, int k,
                                 const std::vector<double>& sigma_total,
                                 RedistributionStats* stats) {
  const int t = k - 1;
  std::vector<std::uint64_t> bits(k, 0);
  for (int j = 0; j < k; ++j)
    for (int i : sets[j]) bits[j] |= std::uint64_t{1} << i;

  std::vector<char> alive(static_cast<std::size_t>(k) * k, 0);
  int edges = 0;
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v)
      if (u != v && (bits[u] & bits[v])) {
        alive[static_cast<std::size_t>(u) * k + v] = 1;
        if (u < v) ++edges;
      }

  auto shared_coords = [&](int a, int b, std::vector<int>& out) {
    out.clear();
    for (std::uint64_t w = bits[a] & bits[b]; w != 0; w &= w - 1)
      out.push_back(std::countr_zero(w));
  };

  std::vector<int> dist(k);
  auto bfs = [&]() {
    std::fill(dist.begin(), dist.end(), -1);
    std::vector<int> q{t};
    dist[t] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int u = q[h];
      for (int v = 0; v < k; ++v)
        if (alive[static_cast<std::size_t>(u) * k + v] && dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
    }
  };

  // lexicographic enumeration of shortest paths from u to t
  std::vector<std::vector<int>> paths;
  std::vector<int> walk;
  auto enumerate_paths = [&](auto&& self, int v) -> void {
    if (paths.size() >= 4096) return;
    if (v == t) {
      paths.push_back(walk);
      return;
    }
    for (int w = 0; w < k; ++w)
      if (alive[static_cast<std::size_t>(v) * k + w] && dist[w] == dist[v] - 1) {
        walk.push_back(w);
        self(self, w);
        walk.pop_back();
      }
  };

  const long cap = static_cast<long>(k) * std::max(edges, 1) * static_cast<long>(parts[0].size()) + 64;
  std::vector<int> coords;
  long sweep = 0;
  for (; sweep < cap; ++sweep) {
    if (stats) ++stats->sweeps;
    if (set_sum(parts[t], sets[t]) >= 1.0 - kHallTol) break;
    bfs();
    bool progress = false;
    bool restart = false;
    int maxd = 0;
    for (int v = 0; v < k; ++v) maxd = std::max(maxd, dist[v]);
    for (int alpha = 1; alpha <= maxd && !restart; ++alpha) {
      for (int u = 0; u < k && !restart; ++u) {
        if (dist[u] != alpha) continue;
        paths.clear();
        walk.assign(1, u);
        enumerate_paths(enumerate_paths, u);
        for (const auto& path : paths) {
          if (set_sum(parts[u], sets[u]) - 1.0 <= kMassTol) break;
          for (std::size_t step = 0; step + 1 < path.size(); ++step) {
            int a = path[step], b = path[step + 1];
            double excess = set_sum(parts[a], sets[a]) - 1.0;
            shared_coords(a, b, coords);
            double shared = 0.0;
            for (int i : coords) shared += parts[a][i];
            double r = std::min(excess, shared);
            if (r <= kMassTol) {
              if (shared <= kMassTol) {
                alive[static_cast<std::size_t>(a) * k + b] = 0;
                alive[static_cast<std::size_t>(b) * k + a] = 0;
                if (stats) ++stats->cuts;
                restart = true;
              }
              break;
            }
            double rem = r;
            for (int i : coords) {
              double take = std::min(parts[a][i], rem);
              parts[a][i] -= take;
              parts[b][i] += take;
              rem -= take;
              if (rem <= 0.0) break;
            }
            progress = true;
          }
          if (restart) break;
          if (set_sum(parts[t], sets[t]) >= 1.0 - kHallTol) break;
        }
        if (set_sum(parts[t], sets[t]) >= 1.0 - kHallTol) {
          restart = false;
          break;
        }
      }
      if (set_sum(parts[t], sets[t]) >= 1.0 - kHallTol) break;
    }
    if (stats) {
      for (std::size_t i = 0; i < sigma_total.size(); ++i) {
        double col = 0.0;
        for (int j = 0; j < k; ++j) col += parts[j][i];
        stats->max_conservation_drift =
            std::max(stats->max_conservation_drift, std::abs(col - sigma_total[i]));
      }
    }
    if (!progress && !restart) break;
  }
  if (sweep >= cap)
    throw Error(ErrorKind::InternalError, "redistribution sweep cap exceeded");

  // final sweep: weight outside a part's own set cannot serve its bound; hand
  // it to the newest part
  for (int j = 0; j < t; ++j) {
    for (std::size_t i = 0; i < parts[j].size(); ++i) {
      if (!(bits[j] >> i & 1) && parts[j][i] != 0.0) {
        parts[t][i] += parts[j][i];
        parts[j][i] = 0.0;
      }
    }
  }
}

inline void throw_infeasible(const WeightInstance& inst, int prefix_len) {
  WeightInstance prefix;
  prefix.n = inst.n;
  prefix.sets.assign(inst.sets.begin(), inst.sets.begin() + prefix_len);
  prefix.sigma = inst.sigma;
  prefix.strict = false;
  auto hall = check_hall_condition(prefix);
  if (!hall.feasible) {
    std::vector<int> payload;
    for (int j : hall.violating_K) payload.push_back(j + 1);
    std::string msg = "infeasible: sets {";
    for (std::size_t i = 0; i < payload.size(); ++i)
      msg += (i ? "," : "") + std::to_string(payload[i]);
    msg += "} jointly cover weight " +
           std::to_string(hall.slack + static_cast<double>(payload.size())) + " < " +
           std::to_string(payload.size());
    throw Error(ErrorKind::InfeasibleInstance, msg, payload);
  }
  throw Error(ErrorKind::InternalError, "redistribution stalled on a feasible instance");
}

inline Decomposition decompose_graph_core(const WeightInstance& inst,
                                          RedistributionStats* stats) {
  const int m = static_cast<int>(inst.sets.size());
  Decomposition parts;
  parts.push_back(inst.sigma);
  if (set_sum(parts[0], inst.sets[0]) < 1.0 - kHallTol) throw_infeasible(inst, 1);
  for (int k = 2; k <= m; ++k) {
    parts.emplace_back(inst.n, 0.0);
    redistribute_to_last(inst.sets, parts, k, inst.sigma, stats);
    if (set_sum(parts[k - 1], inst.sets[k - 1]) < 1.0 - kHallTol) throw_infeasible(inst, k);
  }
  return parts;
}

inline Decomposition decompose_flow_core(const WeightInstance& inst) {
  const int m = static_cast<int>(inst.sets.size());
  std::vector<SupportVector> sup(m, SupportVector(inst.n));
  for (int j = 0; j < m; ++j)
    for (int i : inst.sets[j]) sup[j].set(i);
  FlowSolver solver;
  solver.set_structure(inst.n, sup);
  double value = solver.solve(inst.sigma);
  if (value < static_cast<double>(m) - kHallTol) {
    std::vector<int> payload;
    for (int j = 0; j < m; ++j)
      if (solver.left_reachable(j)) payload.push_back(j + 1);
    throw Error(ErrorKind::InfeasibleInstance,
                "infeasible: transportation deficit " +
                    std::to_string(static_cast<double>(m) - value),
                payload);
  }
  Decomposition parts(m, std::vector<double>(inst.n, 0.0));
  for (int j = 0; j < m; ++j) {
    const auto& S = inst.sets[j];
    for (std::size_t kk = 0; kk < S.size(); ++kk) parts[j][S[kk]] = solver.lr_flow(j, static_cast<int>(kk));
  }
  // park the unrouted remainder in the last part
  for (int i = 0; i < inst.n; ++i) {
    double used = 0.0;
    for (int j = 0; j < m; ++j) used += parts[j][i];
    double rest = inst.sigma[i] - used;
    if (rest > 0.0) parts[m - 1][i] += rest;
  }
  return parts;
}

template <typename Core>
inline Decomposition decompose_dispatch(const WeightInstance& inst, Core core) {
  auto v = validate_instance(inst);
  if (!v.strict) return core(v);
  // strict variant: shrink uniformly, decompose, then return the shaved
  // weight in equal shares so every entry and every bound ends up strict
  auto hall = check_hall_condition(v);
  if (!hall.feasible) {
    std::vector<int> payload;
    for (int j : hall.violating_K) payload.push_back(j + 1);
    throw Error(ErrorKind::InfeasibleInstance,
                "infeasible strict instance: minimal slack " + std::to_string(hall.slack),
                payload);
  }
  const int m = static_cast<int>(v.sets.size());
  double sigma_min = *std::min_element(v.sigma.begin(), v.sigma.end());
  double lambda = std::min(hall.slack / (4.0 * v.n), sigma_min / 2.0);
  WeightInstance inner = v;
  inner.strict = false;
  for (double& x : inner.sigma) x -= lambda;
  Decomposition parts = core(inner);
  const double share = lambda / static_cast<double>(m);
  for (auto& p : parts)
    for (double& x : p) x += share;
  return parts;
}

}  // namespace detail

// Constructive decomposition along the intersection graph.
inline Decomposition decompose_graph(const WeightInstance& inst,
                                     detail::RedistributionStats* stats = nullptr) {
  return detail::decompose_dispatch(
      inst, [&](const WeightInstance& v) { return detail::decompose_graph_core(v, stats); });
}

// Decomposition read off a maximum transportation flow.
inline Decomposition decompose_flow(const WeightInstance& inst) {
  return detail::decompose_dispatch(
      inst, [](const WeightInstance& v) { return detail::decompose_flow_core(v); });
}

}  // namespace shintani
