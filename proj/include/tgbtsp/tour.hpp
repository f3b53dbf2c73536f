#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "tgbtsp/error.hpp"
#include "tgbtsp/instance.hpp"
#include "tgbtsp/moments.hpp"
#include "tgbtsp/rng.hpp"

namespace tgbtsp {

using Node = int;

// A Hamiltonian cycle as a node order. Canonical form starts at node 0 and
// has order[1] < order[n-1], so each undirected cycle has one representation.
struct Tour {
  std::vector<Node> order;
  std::optional<double> length;

  std::size_t size() const noexcept { return order.size(); }

  bool is_valid(std::size_t n) const {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (Node v : order) {
      if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]) return false;
      seen[static_cast<std::size_t>(v)] = true;
    }
    return true;
  }

  bool is_canonical() const {
    const std::size_t n = order.size();
    return n > 0 && order[0] == 0 && (n < 3 || order[1] < order[n - 1]);
  }

  Tour canonical() const {
    Tour t;
    const std::size_t n = order.size();
    if (n == 0) return t;
    const auto zero = static_cast<std::size_t>(std::find(order.begin(), order.end(), 0) - order.begin());
    t.order.resize(n);
    for (std::size_t k = 0; k < n; ++k) t.order[k] = order[(zero + k) % n];
    if (n >= 3 && t.order[1] > t.order[n - 1]) std::reverse(t.order.begin() + 1, t.order.end());
    t.length = length;
    return t;
  }
};

// Sum of c(T(k), T(k+1)) around the cycle.
inline double tour_length(std::span<const Node> order, const CostMatrix& c) {
  if (order.size() != c.size()) {
    throw DomainError("dimension-mismatch", "tour_length: tour has " + std::to_string(order.size()) +
                                                " nodes, cost matrix has " + std::to_string(c.size()));
  }
  if (order.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) total += c(order[k], order[k + 1]);
  return total + c(order.back(), order.front());
}

inline double tour_length(const Tour& t, const CostMatrix& c) { return tour_length(t.order, c); }

// ---------------------------------------------------------------------------
// Exact mean and variance over all (n-1)!/2 tours.
//
// For a uniformly random Hamiltonian cycle, with X_e the indicator of edge e:
//   P(X_e)                  = 2 / (n-1)
//   P(X_e X_f), e~f share a node = 2 / ((n-1)(n-2))
//   P(X_e X_f), e,f disjoint     = 4 / ((n-1)(n-2))      (n >= 5)

struct CooccurrenceProbabilities {
  double same = 0.0;
  double adjacent = 0.0;
  double disjoint = 0.0;
};

inline CooccurrenceProbabilities cooccurrence_probabilities(std::size_t n) {
  const double m = static_cast<double>(n);
  return {2.0 / (m - 1.0), 2.0 / ((m - 1.0) * (m - 2.0)), 4.0 / ((m - 1.0) * (m - 2.0))};
}

inline double exact_mean(const CostMatrix& c) {
  const std::size_t n = c.size();
  if (n < 3) throw DomainError("too-few-nodes", "exact_mean: n must be >= 3");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += c(i, j);
  return static_cast<double>(2.0L * sum / static_cast<long double>(n - 1));
}

inline double exact_variance(const CostMatrix& c) {
  const std::size_t n = c.size();
  if (n < 5) throw DomainError("too-few-nodes", "exact_variance: n must be >= 5 (use enumeration)");
  // Tours always hold n edges, so sum_f Cov(X_e, X_f) = 0 for every e and the
  // variance is unchanged by subtracting the mean edge cost. Centering removes
  // the E[L^2] - mean^2 cancellation.
  long double edge_sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edge_sum += c(i, j);
  const long double edges = static_cast<long double>(n * (n - 1) / 2);
  const long double cbar = edge_sum / edges;

  long double squares = 0.0L;  // sum_e d_e^2
  long double adjacent = 0.0L;  // sum over ordered adjacent pairs d_e d_f
  for (std::size_t v = 0; v < n; ++v) {
    long double r = 0.0L, q = 0.0L;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v) continue;
      const long double d = c(u, v) - cbar;
      r += d;
      q += d * d;
    }
    adjacent += r * r - q;
    squares += q;
  }
  squares /= 2.0L;  // each edge counted from both endpoints
  const auto p = cooccurrence_probabilities(n);
  const long double p1 = p.same;
  const long double cov_same = p1 - p1 * p1;
  const long double cov_adj = p.adjacent - p1 * p1;
  const long double cov_dis = p.disjoint - p1 * p1;
  // sum of d_e d_f over ordered disjoint pairs = -(squares + adjacent) since sum d_e = 0.
  const long double var = (cov_same - cov_dis) * squares + (cov_adj - cov_dis) * adjacent;
  return static_cast<double>(std::max(var, 0.0L));
}

// ---------------------------------------------------------------------------
// Full enumeration.

struct EnumerationOptions {
  std::size_t cap = 14;          // largest n enumerated without override
  bool allow_above_cap = false;
  unsigned workers = 1;
  // Called after each shard completes with (shards done, shard total).
  std::function<void(std::size_t, std::size_t)> progress;
};

inline std::uint64_t canonical_tour_count(std::size_t n) {
  if (n < 3) return 0;
  std::uint64_t f = 1;
  for (std::uint64_t k = 2; k < n; ++k) f *= k;
  return f / 2;
}

namespace detail {

struct NoVisit {
  void operator()(std::span<const Node>, double) const noexcept {}
};

template <class Visitor>
concept MergeableVisitor = std::copy_constructible<Visitor> && requires(Visitor v, const Visitor& o) {
  v.merge(o);
};

// Enumerates the tours of one shard: order[1] = a, order[n-1] = b, middle
// positions 2..n-2 filled by every permutation of the remaining nodes.
template <class Visitor>
class ShardWalker {
 public:
  ShardWalker(const CostMatrix& c, Node a, Node b, Visitor& visit, MomentAccumulator& acc, double shift)
      : c_(c), n_(c.size()), b_(b), visit_(visit), acc_(acc), block_(shift) {
    order_.resize(n_);
    order_[0] = 0;
    order_[1] = a;
    order_[n_ - 1] = b;
    std::size_t p = 2;
    for (Node v = 1; static_cast<std::size_t>(v) < n_; ++v) {
      if (v != a && v != b) order_[p++] = v;
    }
    close_ = c_(static_cast<std::size_t>(b), 0);
    to_b_ = c_.row(static_cast<std::size_t>(b));
  }

  void run() {
    const double start = c_(0, static_cast<std::size_t>(order_[1]));
    if (n_ == 3) {
      leaf(start + to_b_[order_[1]] + close_);
    } else {
      recurse(2, start);
    }
    block_.flush_into(acc_);
  }

 private:
  static constexpr std::uint64_t kBlock = 1ULL << 22;

  void leaf(double length) {
    visit_(std::span<const Node>(order_), length);
    block_.add(length);
    if (block_.size() >= kBlock) block_.flush_into(acc_);
  }

  // order_[p-1] is placed; positions p..n-2 hold the free pool.
  void recurse(std::size_t p, double partial) {
    const std::size_t last = n_ - 2;
    const Node prev = order_[p - 1];
    const double* row = c_.row(static_cast<std::size_t>(prev));
    if (p == last) {
      const Node x = order_[p];
      leaf(partial + row[x] + to_b_[x] + close_);
      return;
    }
    if (p + 1 == last) {
      const Node x = order_[p], y = order_[p + 1];
      const double xy = c_(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      leaf(partial + row[x] + xy + to_b_[y] + close_);
      std::swap(order_[p], order_[p + 1]);
      leaf(partial + row[y] + xy + to_b_[x] + close_);
      std::swap(order_[p], order_[p + 1]);
      return;
    }
    for (std::size_t i = p; i <= last; ++i) {
      std::swap(order_[p], order_[i]);
      recurse(p + 1, partial + row[order_[p]]);
      std::swap(order_[p], order_[i]);
    }
  }

  const CostMatrix& c_;
  std::size_t n_;
  Node b_;
  Visitor& visit_;
  MomentAccumulator& acc_;
  ShiftedBlock block_;
  std::vector<Node> order_;
  double close_ = 0.0;
  const double* to_b_ = nullptr;
};

}  // namespace detail

// Visits each of the (n-1)!/2 canonical tours exactly once and returns the
// exact moments. Work is sharded by the pair (order[1], order[n-1]); shard
// results are merged in shard order, so the outcome does not depend on the
// worker count. With workers > 1 a visitor that provides merge() is copied
// per shard and merged back in shard order; any other visitor is shared and
// must tolerate concurrent calls.
template <class Visitor>
  requires std::invocable<std::remove_cvref_t<Visitor>&, std::span<const Node>, double>
MomentSet enumerate_tours(const CostMatrix& c, Visitor&& visit, const EnumerationOptions& opts = {}) {
  using V = std::remove_cvref_t<Visitor>;
  const std::size_t n = c.size();
  if (n < 3) throw DomainError("too-few-nodes", "enumerate_tours: n must be >= 3");
  if (n > opts.cap && !opts.allow_above_cap) {
    throw DomainError("enumeration-cap", "enumerate_tours: n = " + std::to_string(n) +
                                             " exceeds the enumeration cap " + std::to_string(opts.cap) +
                                             " (explicit override required)");
  }
  std::vector<std::pair<Node, Node>> shards;
  for (Node a = 1; static_cast<std::size_t>(a) < n; ++a)
    for (Node b = a + 1; static_cast<std::size_t>(b) < n; ++b) shards.emplace_back(a, b);

  const double shift = exact_mean(c);
  std::vector<MomentAccumulator> partial(shards.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(shards.size())));

  if (workers == 1) {
    for (std::size_t s = 0; s < shards.size(); ++s) {
      detail::ShardWalker<V> walker(c, shards[s].first, shards[s].second, visit, partial[s], shift);
      walker.run();
      if (opts.progress) opts.progress(s + 1, shards.size());
    }
  } else {
    constexpr bool kMergeable = detail::MergeableVisitor<V>;
    std::vector<std::optional<V>> copies;
    if constexpr (kMergeable) copies.resize(shards.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    auto work = [&] {
      for (std::size_t s = next++; s < shards.size(); s = next++) {
        if constexpr (kMergeable) {
          copies[s].emplace(visit);
          detail::ShardWalker<V> walker(c, shards[s].first, shards[s].second, *copies[s], partial[s], shift);
          walker.run();
        } else {
          detail::ShardWalker<V> walker(c, shards[s].first, shards[s].second, visit, partial[s], shift);
          walker.run();
        }
        const std::size_t d = ++done;
        if (opts.progress) {
          std::lock_guard lock(progress_mutex);
          opts.progress(d, shards.size());
        }
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    if constexpr (kMergeable) {
      for (auto& copy : copies) visit.merge(*copy);
    }
  }

  MomentAccumulator total;
  for (const auto& p : partial) total.merge(p);
  return total.finish(MomentBasis::exact_enumeration);
}

inline MomentSet enumerate_tours(const CostMatrix& c, const EnumerationOptions& opts = {}) {
  detail::NoVisit none;
  return enumerate_tours(c, none, opts);
}

// Minimum and maximum tours by enumeration (ties broken by first visit).
struct ExtremeTours {
  Tour shortest;
  Tour longest;
};

inline ExtremeTours enumerate_extreme_tours(const CostMatrix& c, const EnumerationOptions& opts = {}) {
  struct Extremes {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<Node> lo_order, hi_order;
    void operator()(std::span<const Node> order, double len) {
      if (len < lo) {
        lo = len;
        lo_order.assign(order.begin(), order.end());
      }
      if (len > hi) {
        hi = len;
        hi_order.assign(order.begin(), order.end());
      }
    }
    void merge(const Extremes& o) {
      if (o.lo < lo) {
        lo = o.lo;
        lo_order = o.lo_order;
      }
      if (o.hi > hi) {
        hi = o.hi;
        hi_order = o.hi_order;
      }
    }
  } ext;
  enumerate_tours(c, ext, opts);
  return {Tour{ext.lo_order, ext.lo}, Tour{ext.hi_order, ext.hi}};
}

// ---------------------------------------------------------------------------
// Uniform tour sampling.

// Tour number `index` of the stream keyed by `seed`: node 0 first, the rest a
// Fisher-Yates shuffle, then canonicalized.
inline Tour sample_tour(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  Tour t;
  t.order.resize(n);
  std::iota(t.order.begin(), t.order.end(), 0);
  CounterRng rng(seed, index);
  for (std::size_t i = n - 1; i >= 2; --i) {
    const auto j = 1 + static_cast<std::size_t>(rng.below(i));
    std::swap(t.order[i], t.order[j]);
  }
  if (n >= 3 && t.order[1] > t.order[n - 1]) std::reverse(t.order.begin() + 1, t.order.end());
  return t;
}

inline MomentSet sample_moments(const CostMatrix& c, std::uint64_t sample_size, std::uint64_t seed,
                                unsigned workers = 1) {
  const std::size_t n = c.size();
  if (sample_size < 1000) throw DomainError("sample-too-small", "sample_moments: sample_size must be >= 1000");
  if (n < 3) throw DomainError("too-few-nodes", "sample_moments: n must be >= 3");

  constexpr std::uint64_t kChunk = 1u << 16;
  const std::uint64_t chunks = (sample_size + kChunk - 1) / kChunk;
  std::vector<MomentAccumulator> partial(chunks);
  const double shift = exact_mean(c);

  auto run_chunk = [&](std::uint64_t k) {
    ShiftedBlock block(shift);
    std::vector<Node> order(n);
    const std::uint64_t end = std::min(sample_size, (k + 1) * kChunk);
    for (std::uint64_t s = k * kChunk; s < end; ++s) {
      std::iota(order.begin(), order.end(), 0);
      CounterRng rng(seed, s);
      for (std::size_t i = n - 1; i >= 2; --i) {
        const auto j = 1 + static_cast<std::size_t>(rng.below(i));
        std::swap(order[i], order[j]);
      }
      block.add(tour_length(order, c));
    }
    block.flush_into(partial[k]);
  };

  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (w == 1) {
    for (std::uint64_t k = 0; k < chunks; ++k) run_chunk(k);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < w; ++i) {
      pool.emplace_back([&] {
        for (std::uint64_t k = next++; k < chunks; k = next++) run_chunk(k);
      });
    }
  }
  MomentAccumulator total;
  for (const auto& p : partial) total.merge(p);
  MomentSet m = total.finish(MomentBasis::sampled);
  m.sample_size = sample_size;
  m.seed = seed;
  m.min.reset();
  m.max.reset();
  return m;
}

// ---------------------------------------------------------------------------
// Histograms.

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::size_t bins() const noexcept { return counts.size(); }
  double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }

  // Normalized so the histogram integrates to 1 (all zero when empty).
  std::vector<double> density() const {
    std::vector<double> d(counts.size(), 0.0);
    if (total == 0) return d;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      d[i] = static_cast<double>(counts[i]) /
             (static_cast<double>(total) * (bin_edges[i + 1] - bin_edges[i]));
    }
    return d;
  }
};

// Streaming builder; mergeable so it can ride along an enumeration.
class HistogramBuilder {
 public:
  HistogramBuilder(std::size_t bins, double lo, double hi) : lo_(lo), hi_(hi), counts_(bins, 0) {
    if (bins < 2) throw DomainError("bad-bins", "histogram: bins must be >= 2");
    if (!(lo < hi)) throw DomainError("bad-range", "histogram: range.min must be < range.max");
    width_ = (hi - lo) / static_cast<double>(bins);
  }

  void add(double x) noexcept {
    const auto bins = static_cast<std::int64_t>(counts_.size());
    auto k = static_cast<std::int64_t>(std::floor((x - lo_) / width_));
    k = std::clamp<std::int64_t>(k, 0, bins - 1);
    ++counts_[static_cast<std::size_t>(k)];
    ++total_;
  }

  void operator()(std::span<const Node>, double length) noexcept { add(length); }

  void merge(const HistogramBuilder& o) {
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    total_ += o.total_;
  }

  Histogram finish() const {
    Histogram h;
    const std::size_t bins = counts_.size();
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo_ + width_ * static_cast<double>(i);
    h.bin_edges.back() = hi_;
    h.counts = counts_;
    h.total = total_;
    return h;
  }

 private:
  double lo_, hi_, width_ = 1.0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

template <class Range>
Histogram histogram(const Range& lengths, std::size_t bins, double lo, double hi) {
  HistogramBuilder b(bins, lo, hi);
  for (double x : lengths) b.add(x);
  return b.finish();
}

}  // namespace tgbtsp
