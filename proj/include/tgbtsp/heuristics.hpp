#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tgbtsp/error.hpp"
#include "tgbtsp/instance.hpp"
#include "tgbtsp/matching.hpp"
#include "tgbtsp/tour.hpp"

namespace tgbtsp {

struct Edge {
  Node u = 0;  // u < v
  Node v = 0;
  double weight = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Multigraph edge list; step 4 of Christofides may hold parallel edges.
struct EdgeSet {
  std::vector<Edge> edges;

  double weight() const {
    double w = 0.0;
    for (const auto& e : edges) w += e.weight;
    return w;
  }
  std::size_t size() const noexcept { return edges.size(); }
};

inline Edge make_edge(Node a, Node b, const CostMatrix& c) {
  if (a > b) std::swap(a, b);
  return {a, b, c(static_cast<std::size_t>(a), static_cast<std::size_t>(b))};
}

enum class HeuristicMethod { christofides, two_opt, three_opt, nearest_neighbor, max_transform };

inline std::string_view to_string(HeuristicMethod m) {
  switch (m) {
    case HeuristicMethod::christofides: return "christofides";
    case HeuristicMethod::two_opt: return "two-opt";
    case HeuristicMethod::three_opt: return "three-opt";
    case HeuristicMethod::nearest_neighbor: return "nearest-neighbor";
    case HeuristicMethod::max_transform: return "max-transform";
  }
  return "unknown";
}

struct HeuristicResult {
  Tour tour;
  double length = 0.0;
  HeuristicMethod method = HeuristicMethod::christofides;
  std::uint64_t improvement_steps = 0;
  // False when an approximate matching was used: the 1.5 bound no longer holds.
  bool exact_matching = true;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Christofides building blocks.

// Kruskal over edges sorted by (weight, u, v): ties resolve lexicographically.
inline EdgeSet minimum_spanning_tree(const CostMatrix& c) {
  const std::size_t n = c.size();
  if (n < 2) throw DomainError("too-few-nodes", "minimum_spanning_tree: n must be >= 2");
  std::vector<Edge> all;
  all.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) all.push_back({static_cast<Node>(i), static_cast<Node>(j), c(i, j)});
  std::stable_sort(all.begin(), all.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.weight, a.u, a.v) < std::tie(b.weight, b.u, b.v);
  });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  EdgeSet tree;
  for (const auto& e : all) {
    const auto ru = find(static_cast<std::size_t>(e.u)), rv = find(static_cast<std::size_t>(e.v));
    if (ru == rv) continue;
    parent[std::max(ru, rv)] = std::min(ru, rv);
    tree.edges.push_back(e);
    if (tree.size() + 1 == n) break;
  }
  return tree;
}

inline std::vector<Node> odd_degree_vertices(const EdgeSet& g, std::size_t n) {
  std::vector<int> degree(n, 0);
  for (const auto& e : g.edges) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  std::vector<Node> odd;
  for (std::size_t v = 0; v < n; ++v)
    if (degree[v] % 2) odd.push_back(static_cast<Node>(v));
  return odd;
}

enum class MatchingMode { exact, greedy };

namespace detail {

// Integer weights for the blossom solver. Integral costs up to 2^40 pass
// through unchanged; otherwise costs are scaled so the largest maps to ~2^40.
inline std::vector<std::int64_t> scaled_costs(std::span<const Node> nodes, const CostMatrix& c) {
  double maxc = 0.0;
  bool integral = true;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double w = c(static_cast<std::size_t>(nodes[a]), static_cast<std::size_t>(nodes[b]));
      maxc = std::max(maxc, w);
      integral = integral && w == std::floor(w);
    }
  }
  constexpr double kTop = 1099511627776.0;  // 2^40
  const double scale = (integral && maxc <= kTop) ? 1.0 : (maxc > 0.0 ? kTop / maxc : 1.0);
  std::vector<std::int64_t> out(nodes.size() * nodes.size(), 0);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      if (a == b) continue;
      out[a * nodes.size() + b] = std::llround(
          c(static_cast<std::size_t>(nodes[a]), static_cast<std::size_t>(nodes[b])) * scale);
    }
  }
  return out;
}

inline EdgeSet greedy_matching(std::span<const Node> nodes, const CostMatrix& c) {
  std::vector<Edge> cand;
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b) cand.push_back(make_edge(nodes[a], nodes[b], c));
  std::stable_sort(cand.begin(), cand.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.weight, x.u, x.v) < std::tie(y.weight, y.u, y.v);
  });
  std::vector<bool> used(c.size(), false);
  EdgeSet m;
  for (const auto& e : cand) {
    if (used[static_cast<std::size_t>(e.u)] || used[static_cast<std::size_t>(e.v)]) continue;
    used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = true;
    m.edges.push_back(e);
  }
  return m;
}

}  // namespace detail

// Minimum-weight perfect matching on the complete graph over `nodes`.
inline EdgeSet min_weight_perfect_matching(std::span<const Node> nodes, const CostMatrix& c,
                                           MatchingMode mode = MatchingMode::exact) {
  if (nodes.size() % 2) {
    throw DomainError("odd-node-set", "min_weight_perfect_matching: node set size " +
                                          std::to_string(nodes.size()) + " is odd");
  }
  if (nodes.empty()) return {};
  if (mode == MatchingMode::greedy) return detail::greedy_matching(nodes, c);

  const auto k = nodes.size();
  const auto w = detail::scaled_costs(nodes, c);
  const std::int64_t top = *std::max_element(w.begin(), w.end()) + 1;
  std::vector<BlossomMatcher::WeightedEdge> edges;
  edges.reserve(k * (k - 1) / 2);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      edges.push_back({static_cast<int>(a), static_cast<int>(b), top - w[a * k + b]});
  const auto mate = BlossomMatcher::solve(static_cast<int>(k), std::move(edges), true);
  EdgeSet m;
  for (std::size_t a = 0; a < k; ++a) {
    const int b = mate[a];
    if (b < 0) throw DomainError("matching-failed", "min_weight_perfect_matching: no perfect matching found");
    if (static_cast<std::size_t>(b) > a) m.edges.push_back(make_edge(nodes[a], nodes[static_cast<std::size_t>(b)], c));
  }
  std::sort(m.edges.begin(), m.edges.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
  return m;
}

// Hierholzer's algorithm. Adjacency lists are ordered by (neighbor, edge
// index) and the walk starts at the lowest vertex with an edge.
inline std::vector<Node> eulerian_circuit(const EdgeSet& g, std::size_t n) {
  if (g.edges.empty()) throw DomainError("empty-graph", "eulerian_circuit: graph has no edges");
  std::vector<std::vector<std::pair<Node, std::size_t>>> adj(n);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n || static_cast<std::size_t>(e.v) >= n) {
      throw DomainError("index-out-of-range", "eulerian_circuit: edge endpoint out of range");
    }
    adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, k);
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, k);
  }
  Node start = -1;
  for (std::size_t v = 0; v < n; ++v) {
    if (adj[v].size() % 2) {
      throw DomainError("odd-degree", "eulerian_circuit: vertex " + std::to_string(v) + " has odd degree");
    }
    std::sort(adj[v].begin(), adj[v].end());
    if (start < 0 && !adj[v].empty()) start = static_cast<Node>(v);
  }
  std::vector<bool> used(g.edges.size(), false);
  std::vector<std::size_t> next(n, 0);
  std::vector<Node> stack{start}, walk;
  while (!stack.empty()) {
    const auto v = static_cast<std::size_t>(stack.back());
    auto& i = next[v];
    while (i < adj[v].size() && used[adj[v][i].second]) ++i;
    if (i == adj[v].size()) {
      walk.push_back(stack.back());
      stack.pop_back();
    } else {
      used[adj[v][i].second] = true;
      stack.push_back(adj[v][i].first);
    }
  }
  if (walk.size() != g.edges.size() + 1) {
    throw DomainError("disconnected", "eulerian_circuit: edge support is not connected");
  }
  std::reverse(walk.begin(), walk.end());
  return walk;
}

// Keeps the first occurrence of every node along a closed walk.
inline Tour shortcut(std::span<const Node> walk, std::size_t n) {
  if (walk.empty() || walk.front() != walk.back()) {
    throw DomainError("open-walk", "shortcut: walk must be closed");
  }
  std::vector<bool> seen(n, false);
  Tour t;
  for (Node v : walk) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw DomainError("index-out-of-range", "shortcut: node out of range");
    if (!seen[static_cast<std::size_t>(v)]) {
      seen[static_cast<std::size_t>(v)] = true;
      t.order.push_back(v);
    }
  }
  if (t.order.size() != n) {
    throw DomainError("missing-node", "shortcut: walk visits " + std::to_string(t.order.size()) + " of " +
                                          std::to_string(n) + " nodes");
  }
  return t;
}

inline double walk_length(std::span<const Node> walk, const CostMatrix& c) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < walk.size(); ++k) {
    total += c(static_cast<std::size_t>(walk[k]), static_cast<std::size_t>(walk[k + 1]));
  }
  return total;
}

inline HeuristicResult christofides(const CostMatrix& c, MatchingMode mode = MatchingMode::exact) {
  const std::size_t n = c.size();
  if (n < 3) throw DomainError("too-few-nodes", "christofides: n must be >= 3");
  const EdgeSet tree = minimum_spanning_tree(c);
  const std::vector<Node> odd = odd_degree_vertices(tree, n);
  const EdgeSet matching = min_weight_perfect_matching(odd, c, mode);
  EdgeSet multigraph = tree;
  multigraph.edges.insert(multigraph.edges.end(), matching.edges.begin(), matching.edges.end());
  const auto walk = eulerian_circuit(multigraph, n);
  HeuristicResult r;
  r.tour = shortcut(walk, n).canonical();
  r.length = tour_length(r.tour, c);
  r.tour.length = r.length;
  r.method = HeuristicMethod::christofides;
  r.exact_matching = mode == MatchingMode::exact;
  if (!r.exact_matching) r.warnings.emplace_back("greedy matching: 1.5 approximation bound not guaranteed");
  return r;
}

// Instance form checks the metric precondition (1 unit of rounding slack for
// TSPLIB-rounded kernels) and warns instead of failing.
inline HeuristicResult christofides(const Instance& inst, MatchingMode mode = MatchingMode::exact) {
  const CostMatrix c = materialize_costs(inst);
  const bool rounded = inst.geometry != Geometry::explicit_matrix &&
                       (inst.geometry == Geometry::geographic || inst.round_euclidean);
  const std::size_t violations = triangle_violations(c, rounded ? 1.0 : 1e-9);
  HeuristicResult r = christofides(c, mode);
  if (violations) {
    r.warnings.push_back("instance violates the triangle inequality in " + std::to_string(violations) +
                         " triples; 1.5 bound not guaranteed");
  }
  return r;
}

inline HeuristicResult nearest_neighbor(const CostMatrix& c, Node start = 0) {
  const std::size_t n = c.size();
  std::vector<bool> used(n, false);
  Tour t;
  Node cur = start;
  used[static_cast<std::size_t>(cur)] = true;
  t.order.push_back(cur);
  for (std::size_t step = 1; step < n; ++step) {
    Node best = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      if (best < 0 || c(static_cast<std::size_t>(cur), v) < c(static_cast<std::size_t>(cur), static_cast<std::size_t>(best))) {
        best = static_cast<Node>(v);
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    t.order.push_back(best);
    cur = best;
  }
  HeuristicResult r;
  r.tour = t.canonical();
  r.length = tour_length(r.tour, c);
  r.tour.length = r.length;
  r.method = HeuristicMethod::nearest_neighbor;
  return r;
}

// ---------------------------------------------------------------------------
// 2-opt / 3-opt local search.

enum class ImprovementStrategy { first_improvement, best_improvement };

struct KOptOptions {
  int k = 3;
  ImprovementStrategy strategy = ImprovementStrategy::first_improvement;
  std::size_t max_passes = 100000;
  // Candidate moves restricted to the nearest `neighbors` nodes; a full scan
  // confirms local optimality before returning. 0 = always full scan.
  std::size_t neighbors = 12;
};

namespace detail {

// Removing edges after positions i < j < k splits the tour into
//   head = t[0..i], s1 = t[i+1..j], s2 = t[j+1..k], tail = t[k+1..n-1].
// Each reconnection is head + X + Y + tail.
enum class Reconnect : int {
  rev1 = 0,      // s1' s2    (2-opt on i, j)
  rev2,          // s1  s2'   (2-opt on j, k)
  rev_both_swap, // s2' s1'   (2-opt on i, k)
  rev_each,      // s1' s2'
  swap,          // s2  s1
  swap_rev1,     // s2  s1'
  swap_rev2,     // s2' s1
};

struct Move {
  double gain = 0.0;
  std::size_t i = 0, j = 0, k = 0;
  Reconnect type = Reconnect::rev1;
};

class LocalSearch {
 public:
  LocalSearch(const CostMatrix& c, std::vector<Node> order, const KOptOptions& opts)
      : c_(c), n_(c.size()), t_(std::move(order)), pos_(n_), opts_(opts) {
    reindex();
    length_ = tour_length(t_, c_);
    integral_ = c_.all_integral();
    if (opts_.neighbors > 0) build_neighbors();
  }

  std::uint64_t optimize() {
    std::uint64_t steps = 0;
    bool use_neighbors = opts_.neighbors > 0 && n_ > opts_.neighbors + 2;
    for (std::size_t pass = 0; pass < opts_.max_passes; ++pass) {
      const std::uint64_t applied = sweep(use_neighbors);
      steps += applied;
      if (applied == 0) {
        if (!use_neighbors) break;
        use_neighbors = false;  // confirm with a full scan
      } else if (opts_.neighbors > 0 && n_ > opts_.neighbors + 2) {
        use_neighbors = true;
      }
    }
    return steps;
  }

  const std::vector<Node>& order() const { return t_; }
  double length() const { return length_; }

 private:
  double cost(Node a, Node b) const { return c_(static_cast<std::size_t>(a), static_cast<std::size_t>(b)); }

  double tolerance() const { return integral_ ? 0.5 : 1e-9 * length_; }

  void reindex() {
    for (std::size_t p = 0; p < n_; ++p) pos_[static_cast<std::size_t>(t_[p])] = p;
  }

  void build_neighbors() {
    const std::size_t k = std::min(opts_.neighbors, n_ - 1);
    neighbors_.assign(n_, {});
    for (std::size_t v = 0; v < n_; ++v) {
      std::vector<Node> others;
      for (std::size_t u = 0; u < n_; ++u)
        if (u != v) others.push_back(static_cast<Node>(u));
      std::stable_sort(others.begin(), others.end(), [&](Node a, Node b) {
        return std::pair(c_(v, static_cast<std::size_t>(a)), a) < std::pair(c_(v, static_cast<std::size_t>(b)), b);
      });
      others.resize(k);
      neighbors_[v] = std::move(others);
    }
  }

  // Best move on the triple (i, j, k); for 2-opt only the (i, j) reversal.
  void evaluate(std::size_t i, std::size_t j, std::size_t k, Move& best) const {
    const Node a = t_[i], b = t_[i + 1], cc = t_[j], d = t_[j + 1];
    if (opts_.k == 2) {
      const Node f = t_[(j + 1) % n_];
      if (f == a) return;
      const double g = cost(a, b) + cost(cc, f) - cost(a, cc) - cost(b, f);
      if (g > best.gain) best = {g, i, j, j, Reconnect::rev1};
      return;
    }
    const Node e = t_[k], f = t_[(k + 1) % n_];
    const double removed = cost(a, b) + cost(cc, d) + cost(e, f);
    const double added[7] = {
        cost(a, cc) + cost(b, d) + cost(e, f),  // rev1
        cost(a, b) + cost(cc, e) + cost(d, f),  // rev2
        cost(a, e) + cost(d, cc) + cost(b, f),  // rev_both_swap
        cost(a, cc) + cost(b, e) + cost(d, f),  // rev_each
        cost(a, d) + cost(e, b) + cost(cc, f),  // swap
        cost(a, d) + cost(e, cc) + cost(b, f),  // swap_rev1
        cost(a, e) + cost(d, b) + cost(cc, f),  // swap_rev2
    };
    for (int m = 0; m < 7; ++m) {
      const double g = removed - added[m];
      if (g > best.gain) best = {g, i, j, k, static_cast<Reconnect>(m)};
    }
  }

  void apply(const Move& m) {
    if (opts_.k == 2) {
      std::reverse(t_.begin() + static_cast<std::ptrdiff_t>(m.i + 1), t_.begin() + static_cast<std::ptrdiff_t>(m.j + 1));
    } else {
      std::vector<Node> s1(t_.begin() + static_cast<std::ptrdiff_t>(m.i + 1), t_.begin() + static_cast<std::ptrdiff_t>(m.j + 1));
      std::vector<Node> s2(t_.begin() + static_cast<std::ptrdiff_t>(m.j + 1), t_.begin() + static_cast<std::ptrdiff_t>(m.k + 1));
      std::vector<Node> x, y;
      switch (m.type) {
        case Reconnect::rev1: x = s1; std::reverse(x.begin(), x.end()); y = s2; break;
        case Reconnect::rev2: x = s1; y = s2; std::reverse(y.begin(), y.end()); break;
        case Reconnect::rev_both_swap:
          x = s2; std::reverse(x.begin(), x.end());
          y = s1; std::reverse(y.begin(), y.end());
          break;
        case Reconnect::rev_each:
          x = s1; std::reverse(x.begin(), x.end());
          y = s2; std::reverse(y.begin(), y.end());
          break;
        case Reconnect::swap: x = s2; y = s1; break;
        case Reconnect::swap_rev1: x = s2; y = s1; std::reverse(y.begin(), y.end()); break;
        case Reconnect::swap_rev2: x = s2; std::reverse(x.begin(), x.end()); y = s1; break;
      }
      std::copy(x.begin(), x.end(), t_.begin() + static_cast<std::ptrdiff_t>(m.i + 1));
      std::copy(y.begin(), y.end(), t_.begin() + static_cast<std::ptrdiff_t>(m.i + 1 + x.size()));
    }
    reindex();
    // Recompute rather than subtract the gain so rounding cannot drift.
    length_ = tour_length(t_, c_);
  }

  // Candidate triples for one i under neighbor pruning: the partner position
  // q comes from near neighbors of a or b, the third index from near
  // neighbors of the endpoints of edge q.
  template <class Fn>
  void neighbor_triples(std::size_t i, Fn&& fn) const {
    const Node a = t_[i], b = t_[i + 1];
    const double ab = cost(a, b);
    auto positions_of = [&](Node g, auto&& out) {
      const std::size_t p = pos_[static_cast<std::size_t>(g)];
      if (p + 1 < n_) out(p);
      if (p >= 1) out(p - 1);
    };
    for (Node x : {a, b}) {
      for (Node g : neighbors_[static_cast<std::size_t>(x)]) {
        if (cost(x, g) >= ab) break;
        positions_of(g, [&](std::size_t q) {
          if (q == i) return;
          if (opts_.k == 2) {
            fn(std::min(i, q), std::max(i, q), 0);
            return;
          }
          for (Node y : {t_[q], t_[(q + 1) % n_]}) {
            for (Node h : neighbors_[static_cast<std::size_t>(y)]) {
              positions_of(h, [&](std::size_t r) {
                if (r == i || r == q) return;
                std::size_t s[3] = {i, q, r};
                std::sort(s, s + 3);
                fn(s[0], s[1], s[2]);
              });
            }
          }
        });
      }
    }
  }

  // One sweep; returns the number of applied moves.
  std::uint64_t sweep(bool use_neighbors) {
    const bool first = opts_.strategy == ImprovementStrategy::first_improvement;
    std::uint64_t applied = 0;
    Move best;
    best.gain = tolerance();
    const double initial_tol = best.gain;
    auto consider = [&](std::size_t i, std::size_t j, std::size_t k) {
      if (opts_.k == 3 && !(i < j && j < k && k < n_)) return;
      if (opts_.k == 2 && !(i < j && j + 1 <= n_ - 1 + 1)) return;
      evaluate(i, j, k, best);
    };
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (use_neighbors) {
        neighbor_triples(i, consider);
      } else if (opts_.k == 2) {
        for (std::size_t j = i + 2; j < n_; ++j) consider(i, j, 0);
      } else {
        for (std::size_t j = i + 1; j < n_; ++j)
          for (std::size_t k = j + 1; k < n_; ++k) consider(i, j, k);
      }
      if (first && best.gain > initial_tol) {
        apply(best);
        ++applied;
        best = Move{};
        best.gain = tolerance();
      }
    }
    if (!first && best.gain > initial_tol) {
      apply(best);
      ++applied;
    }
    return applied;
  }

  const CostMatrix& c_;
  std::size_t n_;
  std::vector<Node> t_;
  std::vector<std::size_t> pos_;
  KOptOptions opts_;
  std::vector<std::vector<Node>> neighbors_;
  double length_ = 0.0;
  bool integral_ = false;
};

}  // namespace detail

inline HeuristicResult k_opt_improve(const Tour& start, const CostMatrix& c, const KOptOptions& opts = {}) {
  if (opts.k != 2 && opts.k != 3) throw DomainError("bad-k", "k_opt_improve: k must be 2 or 3");
  if (opts.max_passes < 1) throw DomainError("bad-passes", "k_opt_improve: max_passes must be >= 1");
  if (!start.is_valid(c.size())) throw DomainError("invalid-tour", "k_opt_improve: start is not a tour on the cost matrix");
  HeuristicResult r;
  r.method = opts.k == 2 ? HeuristicMethod::two_opt : HeuristicMethod::three_opt;
  if (c.size() < 4) {
    r.tour = start.canonical();
    r.length = tour_length(r.tour, c);
    r.tour.length = r.length;
    return r;
  }
  detail::LocalSearch ls(c, start.order, opts);
  r.improvement_steps = ls.optimize();
  Tour t{ls.order(), std::nullopt};
  r.tour = r.improvement_steps ? t.canonical() : start;
  r.length = tour_length(r.tour, c);
  r.tour.length = r.length;
  return r;
}

// Best of Christofides + 3-opt and `restarts` seeded random starts + 3-opt.
inline HeuristicResult multi_start_three_opt(const CostMatrix& c, std::size_t restarts = 0, std::uint64_t seed = 1,
                                             const KOptOptions& opts = {}) {
  KOptOptions o = opts;
  o.k = 3;
  const HeuristicResult start = christofides(c);
  HeuristicResult best = k_opt_improve(start.tour, c, o);
  best.exact_matching = start.exact_matching;
  for (std::size_t s = 0; s < restarts; ++s) {
    HeuristicResult r = k_opt_improve(sample_tour(c.size(), seed, s), c, o);
    if (r.length < best.length) {
      r.exact_matching = best.exact_matching;
      best = std::move(r);
    }
  }
  return best;
}

inline HeuristicResult christofides_three_opt(const CostMatrix& c, const KOptOptions& opts = {}) {
  return multi_start_three_opt(c, 0, 1, opts);
}

// Maximum tour estimate: minimize M - c with the search above, map back.
struct MaxTourEstimate {
  double length = 0.0;
  Tour tour;  // achieves `length` on the original costs
  std::uint64_t improvement_steps = 0;
};

inline MaxTourEstimate max_tour_estimate(const CostMatrix& c, std::size_t restarts = 0, std::uint64_t seed = 1,
                                         const KOptOptions& opts = {}) {
  const MaxTransform tm = transform_max(c);
  const HeuristicResult best = multi_start_three_opt(tm.costs, restarts, seed, opts);
  MaxTourEstimate est;
  est.tour = best.tour;
  est.length = tour_length(best.tour, c);
  est.tour.length = est.length;
  est.improvement_steps = best.improvement_steps;
  return est;
}

inline double max_tour_heuristic(const CostMatrix& c, std::size_t restarts = 0, std::uint64_t seed = 1) {
  return max_tour_estimate(c, restarts, seed).length;
}

inline double max_tour_heuristic(const Instance& inst, std::size_t restarts = 0, std::uint64_t seed = 1) {
  return max_tour_heuristic(materialize_costs(inst), restarts, seed);
}

}  // namespace tgbtsp
