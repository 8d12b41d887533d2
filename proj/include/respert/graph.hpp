#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "respert/errors.hpp"

namespace respert {

using Edge = std::pair<int, int>;  // canonical form: first < second

/// Immutable simple undirected graph on vertices 0..n-1. Construct through
/// graph_from_edge_list (or the growth helpers below); edges are stored
/// canonically (u < v, sorted, deduplicated) and never mutate afterwards,
/// so values can be shared freely between threads.
class Graph {
 public:
  Graph() = default;

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  bool has_edge(int u, int v) const {
    if (u == v || u < 0 || v < 0 || u >= n_ || v >= n_) return false;
    const std::vector<int>& nb = adj_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  friend Graph graph_from_edge_list(int n, const std::vector<Edge>& pairs);

  Graph(int n, std::vector<Edge> canonical_edges)
      : n_(n), edges_(std::move(canonical_edges)), adj_(static_cast<std::size_t>(n)) {
    for (const Edge& e : edges_) {
      adj_[e.first].push_back(e.second);
      adj_[e.second].push_back(e.first);
    }
    for (std::vector<int>& nb : adj_) std::sort(nb.begin(), nb.end());
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

/// Component id per vertex; the id is the smallest vertex id in the
/// component, so labels are deterministic.
struct ComponentLabeling {
  std::vector<int> labels;
  int component_count = 0;
};

/// Builds a graph from loose pairs: endpoints are range-checked, pair order
/// is normalized and duplicates collapse. Self-loops are rejected.
inline Graph graph_from_edge_list(int n, const std::vector<Edge>& pairs) {
  if (n < 0) throw InvalidParameter("vertex count must be nonnegative");
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const Edge& p : pairs) {
    int u = p.first, v = p.second;
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InvalidEdge("edge endpoint out of range: (" + std::to_string(u) + "," +
                        std::to_string(v) + ") with n=" + std::to_string(n));
    }
    if (u == v) throw InvalidEdge("self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
    edges.emplace_back(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph(n, std::move(edges));
}

/// New graph with one extra vertex (id = old vertex count) attached to the
/// given existing vertices. The input graph is left untouched.
inline Graph with_added_vertex(const Graph& g, const std::vector<int>& neighbors) {
  const int n = g.vertex_count();
  std::vector<Edge> edges = g.edges();
  for (int v : neighbors) {
    if (v < 0 || v >= n) {
      throw InvalidEdge("attachment endpoint " + std::to_string(v) +
                        " out of range for n=" + std::to_string(n));
    }
    edges.emplace_back(v, n);
  }
  return graph_from_edge_list(n + 1, edges);
}

/// Subgraph induced by vertices 0..k-1.
inline Graph induced_prefix(const Graph& g, int k) {
  if (k < 0 || k > g.vertex_count()) throw InvalidParameter("invalid prefix size");
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (e.second < k) edges.push_back(e);
  }
  return graph_from_edge_list(k, edges);
}

inline ComponentLabeling components(const Graph& g) {
  const int n = g.vertex_count();
  ComponentLabeling out;
  out.labels.assign(static_cast<std::size_t>(n), -1);
  for (int root = 0; root < n; ++root) {
    if (out.labels[root] != -1) continue;
    ++out.component_count;
    // BFS from ascending roots: the root is the smallest id in its component.
    std::vector<int> queue{root};
    out.labels[root] = root;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (int w : g.neighbors(queue[head])) {
        if (out.labels[w] == -1) {
          out.labels[w] = root;
          queue.push_back(w);
        }
      }
    }
  }
  return out;
}

/// Combinatorial Laplacian L = D - A. Integer-valued, row sums exactly zero.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  const int n = g.vertex_count();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    L(e.first, e.second) = -1.0;
    L(e.second, e.first) = -1.0;
    L(e.first, e.first) += 1.0;
    L(e.second, e.second) += 1.0;
  }
  return L;
}

// Edge-list file format: first line "n m", then m lines "u v" (0-based,
// u < v on write). Lines starting with '#' are ignored on read.

inline void write_edge_list(const Graph& g, std::ostream& os) {
  os << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) os << e.first << ' ' << e.second << '\n';
  if (!os) throw IoError("failed writing edge list");
}

inline Graph read_edge_list(std::istream& is) {
  auto next_data_line = [&is](std::string& line) {
    while (std::getline(is, line)) {
      std::size_t pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;  // blank
      if (line[pos] == '#') continue;          // comment
      return true;
    }
    return false;
  };

  std::string line;
  if (!next_data_line(line)) throw IoError("edge list: missing header line");
  long long n = 0, m = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> m) || n < 0 || m < 0) throw IoError("edge list: malformed header '" + line + "'");
  }
  std::vector<Edge> pairs;
  pairs.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_data_line(line)) throw IoError("edge list: expected " + std::to_string(m) + " edges");
    std::istringstream es(line);
    int u = 0, v = 0;
    if (!(es >> u >> v)) throw IoError("edge list: malformed edge line '" + line + "'");
    pairs.emplace_back(u, v);
  }
  return graph_from_edge_list(static_cast<int>(n), pairs);
}

}  // namespace respert
