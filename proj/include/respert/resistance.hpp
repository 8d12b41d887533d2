#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "respert/errors.hpp"
#include "respert/graph.hpp"

namespace respert {

/// Renormalization parameter for distances: a resistance r maps to
/// r / (r + beta), which compresses [0,inf] into [0,1].
struct DistanceParams {
  double beta = 1.0;
};

/// Symmetric matrix of pairwise effective resistances. Pairs in different
/// components are DISCONNECTED, which is kept out of band: at() returns
/// std::nullopt for them and no stored float ever encodes "infinite".
class ResistanceMatrix {
 public:
  int size() const { return n_; }

  bool connected(int u, int v) const {
    return labeling_.labels[u] == labeling_.labels[v];
  }

  /// Resistance, or std::nullopt when u and v lie in different components.
  std::optional<double> at(int u, int v) const {
    if (!connected(u, v)) return std::nullopt;
    return values_(u, v);
  }

  /// Resistance for a pair known to be connected.
  double finite_at(int u, int v) const {
    if (!connected(u, v)) {
      throw PreconditionViolation("finite_at on disconnected pair (" + std::to_string(u) +
                                  "," + std::to_string(v) + ")");
    }
    return values_(u, v);
  }

  const ComponentLabeling& labeling() const { return labeling_; }

 private:
  friend ResistanceMatrix resistance_matrix(const Graph&);
  friend ResistanceMatrix update_add_edge(const ResistanceMatrix&, int, int);
  friend ResistanceMatrix read_matrix_csv(std::istream&);

  ResistanceMatrix(int n, Eigen::MatrixXd values, ComponentLabeling labeling)
      : n_(n), values_(std::move(values)), labeling_(std::move(labeling)) {}

  int n_ = 0;
  Eigen::MatrixXd values_;  // entries across components are unused slots
  ComponentLabeling labeling_;
};

/// All pairwise effective resistances of g. Each connected component is
/// solved independently: with L the component Laplacian of size k, the
/// pseudoinverse is (L + J/k)^-1 - J/k and R(u,v) = P(u,u)+P(v,v)-2P(u,v).
inline ResistanceMatrix resistance_matrix(const Graph& g) {
  const int n = g.vertex_count();
  ComponentLabeling labeling = components(g);
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);

  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) groups[labeling.labels[v]].push_back(v);

  for (const std::vector<int>& comp : groups) {
    const int k = static_cast<int>(comp.size());
    if (k < 2) continue;
    std::vector<int> local(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < k; ++i) local[comp[i]] = i;

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      for (int w : g.neighbors(comp[i])) {
        L(i, local[w]) = -1.0;
        L(i, i) += 1.0;
      }
    }
    const double shift = 1.0 / k;
    Eigen::MatrixXd M = L;
    M.array() += shift;
    Eigen::MatrixXd P = M.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    P.array() -= shift;

    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        double r = P(i, i) + P(j, j) - 2.0 * P(i, j);
        if (r < 0.0) r = 0.0;  // roundoff guard; true values are nonnegative
        values(comp[i], comp[j]) = r;
        values(comp[j], comp[i]) = r;
      }
    }
  }
  return ResistanceMatrix(n, std::move(values), std::move(labeling));
}

namespace detail {

inline double principal_minor_det(const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>& L,
                                  int drop1, int drop2) {
  const int k = static_cast<int>(L.rows());
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    if (i != drop1 && i != drop2) keep.push_back(i);
  }
  const int m = static_cast<int>(keep.size());
  if (m == 0) return 1.0;
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> sub(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) sub(i, j) = L(keep[i], keep[j]);
  }
  return static_cast<double>(sub.fullPivLu().determinant());
}

}  // namespace detail

/// Independent cross-check of resistance_matrix by spanning-tree counting:
/// deleting row/column u from the component Laplacian gives the number of
/// spanning trees; deleting u and v gives the number of two-tree forests
/// separating them, and the resistance is the ratio. Long-double LU keeps
/// the counts exact enough for small graphs, which is the intended scale.
inline std::optional<double> oracle_resistance(const Graph& g, int u, int v) {
  const int n = g.vertex_count();
  if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidParameter("vertex out of range");
  if (u == v) return 0.0;
  ComponentLabeling labeling = components(g);
  if (labeling.labels[u] != labeling.labels[v]) return std::nullopt;

  std::vector<int> comp;
  std::vector<int> local(static_cast<std::size_t>(n), -1);
  for (int w = 0; w < n; ++w) {
    if (labeling.labels[w] == labeling.labels[u]) {
      local[w] = static_cast<int>(comp.size());
      comp.push_back(w);
    }
  }
  const int k = static_cast<int>(comp.size());
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> L =
      Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int w : g.neighbors(comp[i])) {
      L(i, local[w]) = -1.0L;
      L(i, i) += 1.0L;
    }
  }
  const double trees = detail::principal_minor_det(L, local[u], -1);
  const double forests = detail::principal_minor_det(L, local[u], local[v]);
  return forests / trees;
}

/// Resistance matrix after inserting the unit-resistance edge (a,b), in
/// O(n^2) instead of a fresh solve. Requires (a,b) not already an edge of
/// the underlying graph.
///
/// Same component: every pair moves by the rank-one correction
///   R'(u,v) = R(u,v) - [(R(u,b)-R(u,a)) - (R(v,b)-R(v,a))]^2 / (4(1+R(a,b))).
/// Different components: the new edge is a bridge, resistances within each
/// side are unchanged, and across the bridge R'(x,y) = R(x,a) + 1 + R(b,y).
inline ResistanceMatrix update_add_edge(const ResistanceMatrix& r, int a, int b) {
  const int n = r.size();
  if (a < 0 || b < 0 || a >= n || b >= n) throw InvalidEdge("endpoint out of range");
  if (a == b) throw InvalidEdge("cannot add a self-loop");

  Eigen::MatrixXd values = r.values_;
  ComponentLabeling labeling = r.labeling_;
  const std::vector<int>& labels = r.labeling_.labels;

  if (r.connected(a, b)) {
    const int comp = labels[a];
    const double denom = 4.0 * (1.0 + r.values_(a, b));
    std::vector<int> members;
    for (int v = 0; v < n; ++v) {
      if (labels[v] == comp) members.push_back(v);
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int u = members[i];
      const double du = r.values_(u, b) - r.values_(u, a);
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const int v = members[j];
        const double dv = r.values_(v, b) - r.values_(v, a);
        const double delta = (du - dv) * (du - dv) / denom;
        double nv = r.values_(u, v) - delta;
        if (nv < 0.0) nv = 0.0;
        values(u, v) = nv;
        values(v, u) = nv;
      }
    }
  } else {
    const int la = labels[a], lb = labels[b];
    std::vector<int> side_a, side_b;
    for (int v = 0; v < n; ++v) {
      if (labels[v] == la) side_a.push_back(v);
      if (labels[v] == lb) side_b.push_back(v);
    }
    for (int x : side_a) {
      for (int y : side_b) {
        const double nv = r.values_(x, a) + 1.0 + r.values_(b, y);
        values(x, y) = nv;
        values(y, x) = nv;
      }
    }
    const int merged = std::min(la, lb);
    for (int v = 0; v < n; ++v) {
      if (labeling.labels[v] == la || labeling.labels[v] == lb) labeling.labels[v] = merged;
    }
    labeling.component_count -= 1;
  }
  return ResistanceMatrix(n, std::move(values), std::move(labeling));
}

/// r/(r+beta) for a finite resistance, 1 for a disconnected pair.
inline double renormalize(std::optional<double> rhat, const DistanceParams& params = {}) {
  if (params.beta <= 0.0) throw InvalidParameter("beta must be positive");
  if (!rhat.has_value()) return 1.0;
  if (*rhat < 0.0) throw InvalidResistance("resistance must be nonnegative");
  return *rhat / (*rhat + params.beta);
}

/// Element-wise p-norm of the difference between the two raw resistance
/// matrices, summed over ordered pairs. Both graphs must be connected and
/// share a vertex count.
inline double rp_distance(const Graph& g1, const Graph& g2, double p) {
  if (p < 1.0) throw InvalidParameter("p-norm order must be >= 1");
  if (g1.vertex_count() != g2.vertex_count()) {
    throw PreconditionViolation("rp_distance requires identical vertex counts "
                                "(use rd_distance for mismatched graphs)");
  }
  const ResistanceMatrix r1 = resistance_matrix(g1);
  const ResistanceMatrix r2 = resistance_matrix(g2);
  if (r1.labeling().component_count != 1 || r2.labeling().component_count != 1) {
    throw PreconditionViolation("rp_distance requires connected graphs "
                                "(use rd_distance for disconnected graphs)");
  }
  const int n = g1.vertex_count();
  double max_abs = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      max_abs = std::max(max_abs, std::abs(r1.finite_at(u, v) - r2.finite_at(u, v)));
    }
  }
  if (max_abs == 0.0) return 0.0;
  // Factor out the largest term so large p cannot overflow.
  double scaled_sum = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double d = std::abs(r1.finite_at(u, v) - r2.finite_at(u, v)) / max_abs;
      scaled_sum += 2.0 * std::pow(d, p);
    }
  }
  return max_abs * std::pow(scaled_sum, 1.0 / p);
}

namespace detail {

inline Graph padded_to(const Graph& g, int n) {
  if (g.vertex_count() == n) return g;
  return graph_from_edge_list(n, g.edges());
}

}  // namespace detail

/// Sum over unordered pairs of |renormalized resistance difference|. The
/// graphs may differ in size and be disconnected: the smaller one is padded
/// with isolated vertices, with vertex i of one graph identified with
/// vertex i of the other.
inline double rd_distance(const Graph& g1, const Graph& g2, const DistanceParams& params = {}) {
  const int n = std::max(g1.vertex_count(), g2.vertex_count());
  const ResistanceMatrix r1 = resistance_matrix(detail::padded_to(g1, n));
  const ResistanceMatrix r2 = resistance_matrix(detail::padded_to(g2, n));
  double sum = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      sum += std::abs(renormalize(r1.at(u, v), params) - renormalize(r2.at(u, v), params));
    }
  }
  return sum;
}

// CSV dump: one row per vertex, "inf" marks a disconnected pair and reads
// back as the sentinel, never as a float.

inline void write_matrix_csv(const ResistanceMatrix& r, std::ostream& os) {
  const int n = r.size();
  os.precision(17);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (v) os << ',';
      if (std::optional<double> x = r.at(u, v)) {
        os << *x;
      } else {
        os << "inf";
      }
    }
    os << '\n';
  }
  if (!os) throw IoError("failed writing resistance matrix");
}

inline ResistanceMatrix read_matrix_csv(std::istream& is) {
  std::vector<std::vector<std::string>> cells;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) row.push_back(tok);
    cells.push_back(std::move(row));
  }
  const int n = static_cast<int>(cells.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::vector<bool>> finite(static_cast<std::size_t>(n),
                                        std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int u = 0; u < n; ++u) {
    if (static_cast<int>(cells[u].size()) != n) throw IoError("resistance csv is not square");
    for (int v = 0; v < n; ++v) {
      const std::string& tok = cells[u][v];
      if (tok == "inf") continue;
      try {
        values(u, v) = std::stod(tok);
      } catch (const std::exception&) {
        throw IoError("resistance csv: bad token '" + tok + "'");
      }
      finite[u][v] = true;
    }
  }
  // Rebuild component labels from the finite/inf pattern.
  ComponentLabeling labeling;
  labeling.labels.assign(static_cast<std::size_t>(n), -1);
  for (int root = 0; root < n; ++root) {
    if (labeling.labels[root] != -1) continue;
    ++labeling.component_count;
    for (int v = root; v < n; ++v) {
      if (labeling.labels[v] == -1 && finite[root][v]) labeling.labels[v] = root;
    }
    labeling.labels[root] = root;
  }
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      const bool same = labeling.labels[u] == labeling.labels[v];
      if (same != finite[u][v] && u != v) throw IoError("resistance csv: inconsistent inf pattern");
    }
  }
  return ResistanceMatrix(n, std::move(values), std::move(labeling));
}

}  // namespace respert
