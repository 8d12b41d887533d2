#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "respert/errors.hpp"
#include "respert/graph.hpp"
#include "respert/rng.hpp"

namespace respert {

// Community convention: the two communities are the odd and even 1-based
// vertex labels, so the 0-based vertex i belongs to C1 when (i+1) is odd.
inline bool same_community(int u, int v) { return (u % 2) == (v % 2); }

/// Edge-probability rule as a function of the graph size n.
struct ScheduleRule {
  enum class Kind { Constant, PowerLog };

  Kind kind = Kind::Constant;
  double c = 0.0;  // constant value, or prefactor of the power-log form
  double a = 0.0;  // exponent of log n (natural log)
  double b = 0.0;  // exponent of n

  static ScheduleRule constant(double value) { return {Kind::Constant, value, 0.0, 0.0}; }

  // c * (log n)^a / n^b
  static ScheduleRule power_log(double c, double a, double b) {
    return {Kind::PowerLog, c, a, b};
  }

  double evaluate(int n) const {
    switch (kind) {
      case Kind::Constant:
        return c;
      case Kind::PowerLog:
        return c * std::pow(std::log(static_cast<double>(n)), a) /
               std::pow(static_cast<double>(n), b);
    }
    throw InvalidParameter("unknown schedule rule");
  }
};

/// (p_n, q_n) family: p_rule gives the in-community probability, q_rule the
/// cross-community one.
struct Schedule {
  ScheduleRule p_rule;
  ScheduleRule q_rule;
};

/// Schedule evaluated at one n, with the expected in-community degree of C1.
struct ScheduleSample {
  int n = 0;
  double p = 0.0;
  double q = 0.0;
  double dbar = 0.0;  // p * (|C1| - 1), |C1| = floor((n+1)/2)
};

inline ScheduleSample evaluate_schedule(const Schedule& s, int n) {
  if (n < 2) throw InvalidParameter("schedule evaluation requires n >= 2");
  ScheduleSample out;
  out.n = n;
  out.p = s.p_rule.evaluate(n);
  out.q = s.q_rule.evaluate(n);
  if (!(out.p >= 0.0 && out.p <= 1.0)) {
    throw ScheduleOutOfRange("p_n=" + std::to_string(out.p) + " outside [0,1] at n=" +
                             std::to_string(n));
  }
  if (!(out.q >= 0.0 && out.q <= 1.0)) {
    throw ScheduleOutOfRange("q_n=" + std::to_string(out.q) + " outside [0,1] at n=" +
                             std::to_string(n));
  }
  out.dbar = out.p * (((n + 1) / 2) - 1);
  return out;
}

namespace detail {

inline void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter(std::string(name) + "=" + std::to_string(p) + " outside [0,1]");
  }
}

// One Bernoulli draw per unordered pair, in lexicographic pair order.
template <typename ProbFn>
Graph sample_pairwise(int n, ProbFn prob, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.bernoulli(prob(u, v))) edges.emplace_back(u, v);
    }
  }
  return graph_from_edge_list(n, edges);
}

}  // namespace detail

/// Erdos-Renyi G(n,p) under the given seed.
inline Graph sample_er(int n, double p, std::uint64_t seed) {
  if (n < 0) throw InvalidParameter("n must be nonnegative");
  detail::check_probability(p, "p");
  return detail::sample_pairwise(n, [p](int, int) { return p; }, seed);
}

/// Balanced two-community blockmodel: in-community pairs appear with
/// probability p, cross-community pairs with probability q.
inline Graph sample_sbm(int n, double p, double q, std::uint64_t seed) {
  if (n < 0) throw InvalidParameter("n must be nonnegative");
  detail::check_probability(p, "p");
  detail::check_probability(q, "q");
  return detail::sample_pairwise(
      n, [p, q](int u, int v) { return same_community(u, v) ? p : q; }, seed);
}

/// Number of edges joining the two communities.
inline int count_cross_edges(const Graph& g) {
  int k = 0;
  for (const Edge& e : g.edges()) {
    if (!same_community(e.first, e.second)) ++k;
  }
  return k;
}

/// One growth-sequence snapshot: the full graph on n+1 vertices, its induced
/// subgraph on the first n, and the cross-edge / edge counts the detector
/// consumes.
struct GrowthPair {
  Graph sub;        // induced subgraph on vertices 0..n-1
  Graph full;       // graph on vertices 0..n
  int k_before = 0; // cross-community edges in sub
  int k_after = 0;  // cross-community edges in full
  int m_before = 0; // edge count of sub
  std::uint64_t seed = 0;
};

/// Builds a graph on n+1 vertices by n successive vertex additions at fixed
/// (p,q): each arriving vertex connects to every previous vertex of its own
/// community with probability p and of the other community with probability
/// q, drawing in ascending neighbor order. Marginally this is exactly the
/// blockmodel on n+1 vertices. Connectivity is not enforced.
inline GrowthPair grow_pair(int n, double p, double q, std::uint64_t seed) {
  if (n < 1) throw InvalidParameter("growth requires n >= 1");
  detail::check_probability(p, "p");
  detail::check_probability(q, "q");
  SplitMix64 rng(seed);
  std::vector<Edge> edges;
  for (int j = 1; j <= n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (rng.bernoulli(same_community(i, j) ? p : q)) edges.emplace_back(i, j);
    }
  }
  GrowthPair out;
  out.full = graph_from_edge_list(n + 1, edges);
  out.sub = induced_prefix(out.full, n);
  out.k_before = count_cross_edges(out.sub);
  out.k_after = count_cross_edges(out.full);
  out.m_before = out.sub.edge_count();
  out.seed = seed;
  return out;
}

inline GrowthPair grow_pair(int n, const ScheduleSample& sample, std::uint64_t seed) {
  return grow_pair(n, sample.p, sample.q, seed);
}

}  // namespace respert
