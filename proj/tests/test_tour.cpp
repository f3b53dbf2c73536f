#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "tgbtsp/instance.hpp"
#include "tgbtsp/moments.hpp"
#include "tgbtsp/tour.hpp"

using namespace tgbtsp;

namespace {

CostMatrix load_costs(const std::string& name) {
  std::ifstream f(std::string(TGBTSP_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << f.rdbuf();
  return materialize_costs(parse_tsplib(ss.str()));
}

CostMatrix constant_costs(std::size_t n, double c) {
  std::vector<double> v(n * n, c);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 0.0;
  return CostMatrix(n, v);
}

CostMatrix unit_square() {
  const double d = std::sqrt(2.0);
  return CostMatrix(4, {0, 1, d, 1, 1, 0, 1, d, d, 1, 0, 1, 1, d, 1, 0});
}

// Brute-force moments over all canonical tours via std::next_permutation.
MomentSet brute_moments(const CostMatrix& c) {
  const std::size_t n = c.size();
  std::vector<Node> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<long double> lengths;
  std::vector<Node> order(n);
  do {
    if (rest.front() > rest.back()) continue;
    order[0] = 0;
    std::copy(rest.begin(), rest.end(), order.begin() + 1);
    lengths.push_back(tour_length(order, c));
  } while (std::next_permutation(rest.begin(), rest.end()));
  long double mean = 0;
  for (auto x : lengths) mean += x;
  mean /= lengths.size();
  long double m2 = 0, m3 = 0, m4 = 0;
  for (auto x : lengths) {
    const long double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const long double k = lengths.size();
  MomentSet m;
  m.mean = static_cast<double>(mean);
  m.variance = static_cast<double>(m2 / k);
  m.skewness = static_cast<double>((m3 / k) / std::pow(m2 / k, 1.5L));
  m.kurtosis = static_cast<double>((m4 / k) / ((m2 / k) * (m2 / k)));
  m.count = lengths.size();
  return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(TourLength, Examples) {
  EXPECT_EQ(tour_length(std::vector<Node>{0, 1, 2}, constant_costs(3, 1.0)), 3.0);
  EXPECT_EQ(tour_length(std::vector<Node>{0, 1, 2, 3}, unit_square()), 4.0);
  EXPECT_THROW(tour_length(std::vector<Node>{0, 1}, unit_square()), DomainError);
}

TEST(TourLength, InvariantUnderRotationAndReversal) {
  for (std::size_t n = 3; n <= 7; ++n) {
    const CostMatrix c = materialize_costs(generate_random(n, n));
    std::vector<Node> order(n);
    std::iota(order.begin(), order.end(), 0);
    do {
      const double base = tour_length(order, c);
      auto rotated = order;
      for (std::size_t r = 1; r < n; ++r) {
        std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
        ASSERT_NEAR(tour_length(rotated, c), base, 1e-12);
      }
      auto reversed = order;
      std::reverse(reversed.begin(), reversed.end());
      ASSERT_NEAR(tour_length(reversed, c), base, 1e-12);
    } while (std::next_permutation(order.begin(), order.end()));
  }
  const CostMatrix c = materialize_costs(generate_random(40, 9));
  for (std::uint64_t s = 0; s < 50; ++s) {
    Tour t = sample_tour(40, 77, s);
    const double base = tour_length(t, c);
    std::rotate(t.order.begin(), t.order.begin() + static_cast<std::ptrdiff_t>(s % 40), t.order.end());
    EXPECT_NEAR(tour_length(t, c), base, 1e-9);
    std::reverse(t.order.begin(), t.order.end());
    EXPECT_NEAR(tour_length(t, c), base, 1e-9);
  }
}

TEST(TourType, Canonicalization) {
  Tour t{{2, 0, 3, 1}, std::nullopt};
  EXPECT_TRUE(t.is_valid(4));
  EXPECT_FALSE(t.is_canonical());
  const Tour c = t.canonical();
  EXPECT_TRUE(c.is_canonical());
  EXPECT_EQ(c.order, (std::vector<Node>{0, 2, 1, 3}));
  EXPECT_FALSE((Tour{{0, 1, 1}, std::nullopt}).is_valid(3));
}

TEST(Enumerate, VisitCountMatchesFormula) {
  EXPECT_EQ(canonical_tour_count(4), 3u);
  EXPECT_EQ(canonical_tour_count(5), 12u);
  for (std::size_t n = 4; n <= 10; ++n) {
    std::uint64_t visits = 0;
    std::set<std::vector<Node>> seen;
    enumerate_tours(materialize_costs(generate_random(n, 1)), [&](std::span<const Node> order, double) {
      ++visits;
      if (n <= 8) {
        std::vector<Node> o(order.begin(), order.end());
        EXPECT_TRUE((Tour{o, std::nullopt}).is_canonical());
        seen.insert(std::move(o));
      }
    });
    EXPECT_EQ(visits, canonical_tour_count(n)) << n;
    if (n <= 8) {
      EXPECT_EQ(seen.size(), canonical_tour_count(n));
    }
  }
}

TEST(Enumerate, MatchesBruteForceMoments) {
  for (std::size_t n = 4; n <= 9; ++n) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const CostMatrix c = materialize_costs(generate_random(n, seed));
      const MomentSet e = enumerate_tours(c);
      const MomentSet b = brute_moments(c);
      EXPECT_EQ(e.count, b.count);
      EXPECT_LT(rel(e.mean, b.mean), 1e-12);
      EXPECT_LT(rel(e.variance, b.variance), 1e-9);
      EXPECT_NEAR(e.skewness, b.skewness, 1e-8);
      EXPECT_NEAR(e.kurtosis, b.kurtosis, 1e-8);
      EXPECT_LE(*e.min, e.mean);
      EXPECT_LE(e.mean, *e.max);
      EXPECT_EQ(e.basis, MomentBasis::exact_enumeration);
    }
  }
}

TEST(Enumerate, IndependentOfWorkerCount) {
  const CostMatrix c = materialize_costs(generate_random(10, 42));
  EnumerationOptions one, four;
  four.workers = 4;
  const MomentSet a = enumerate_tours(c, one), b = enumerate_tours(c, four);
  EXPECT_EQ(a.count, b.count);
  EXPECT_LT(rel(a.mean, b.mean), 1e-12);
  EXPECT_LT(rel(a.variance, b.variance), 1e-12);
  EXPECT_NEAR(a.skewness, b.skewness, 1e-10);
  EXPECT_NEAR(a.kurtosis, b.kurtosis, 1e-10);
  EXPECT_EQ(*a.min, *b.min);
  EXPECT_EQ(*a.max, *b.max);
}

TEST(Enumerate, RefusesAboveCap) {
  EnumerationOptions o;
  o.cap = 9;
  EXPECT_THROW(enumerate_tours(materialize_costs(generate_random(10, 1)), o), DomainError);
}

TEST(Enumerate, ExtremeToursAreCanonicalAndConsistent) {
  const CostMatrix c = materialize_costs(generate_random(9, 5));
  const ExtremeTours ext = enumerate_extreme_tours(c);
  const MomentSet m = enumerate_tours(c);
  EXPECT_TRUE(ext.shortest.is_canonical());
  EXPECT_NEAR(tour_length(ext.shortest, c), *m.min, 1e-12);
  EXPECT_NEAR(tour_length(ext.longest, c), *m.max, 1e-12);
}

TEST(CoOccurrence, MatchesBruteForceCounts) {
  for (std::size_t n = 5; n <= 8; ++n) {
    // Count tours containing edge (0,1); (0,1)+(1,2); (0,1)+(2,3).
    std::uint64_t total = 0, same = 0, adj = 0, dis = 0;
    auto has = [&](std::span<const Node> o, Node a, Node b) {
      for (std::size_t k = 0; k < o.size(); ++k) {
        const Node u = o[k], v = o[(k + 1) % o.size()];
        if ((u == a && v == b) || (u == b && v == a)) return true;
      }
      return false;
    };
    enumerate_tours(constant_costs(n, 1.0), [&](std::span<const Node> o, double) {
      ++total;
      const bool e01 = has(o, 0, 1);
      same += e01;
      adj += e01 && has(o, 1, 2);
      dis += e01 && has(o, 2, 3);
    });
    const CooccurrenceProbabilities p = cooccurrence_probabilities(n);
    const double t = static_cast<double>(total);
    EXPECT_NEAR(p.same, same / t, 1e-15) << n;
    EXPECT_NEAR(p.adjacent, adj / t, 1e-15) << n;
    EXPECT_NEAR(p.disjoint, dis / t, 1e-15) << n;
  }
}

TEST(ExactMoments, MeanMatchesEnumeration) {
  EXPECT_EQ(exact_mean(constant_costs(4, 1.0)), 4.0);
  for (std::size_t n = 4; n <= 9; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const CostMatrix c = materialize_costs(generate_random(n, 1000 + seed));
      EXPECT_LT(rel(exact_mean(c), enumerate_tours(c).mean), 1e-9);
    }
  }
}

TEST(ExactMoments, VarianceMatchesEnumeration) {
  EXPECT_NEAR(exact_variance(constant_costs(7, 3.0)), 0.0, 1e-12);
  for (std::size_t n = 5; n <= 9; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const CostMatrix c = materialize_costs(generate_random(n, 2000 + seed));
      EXPECT_LT(rel(exact_variance(c), enumerate_tours(c).variance), 1e-9);
    }
  }
  EXPECT_THROW(exact_variance(constant_costs(4, 1.0)), DomainError);
}

TEST(ExactMoments, Burma14ClosedForm) {
  const CostMatrix c = load_costs("burma14.tsp");
  EXPECT_NEAR(exact_mean(c), 86738.0 / 13.0, 1e-9);
  EXPECT_NEAR(exact_variance(c), 503215.0, 1.0);
}

TEST(Sampling, DeterministicAndConstantCase) {
  const CostMatrix c = materialize_costs(generate_random(15, 3));
  const MomentSet a = sample_moments(c, 5000, 11), b = sample_moments(c, 5000, 11);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.basis, MomentBasis::sampled);
  EXPECT_EQ(a.seed, 11u);
  EXPECT_EQ(a.sample_size, 5000u);
  EXPECT_EQ(sample_moments(constant_costs(8, 2.0), 2000, 1).variance, 0.0);
  EXPECT_THROW(sample_moments(c, 999, 1), DomainError);
}

TEST(Sampling, IndependentOfWorkerCount) {
  const CostMatrix c = materialize_costs(generate_random(12, 3));
  const MomentSet a = sample_moments(c, 200000, 5, 1), b = sample_moments(c, 200000, 5, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
}

TEST(Sampling, WithinThreeStandardErrorsOfEnumeration) {
  const CostMatrix c = materialize_costs(generate_random(10, 17));
  const MomentSet e = enumerate_tours(c);
  const std::uint64_t N = 400000;
  const MomentSet s = sample_moments(c, N, 99);
  const double sd = std::sqrt(e.variance), n = static_cast<double>(N);
  EXPECT_LT(std::abs(s.mean - e.mean), 3.0 * sd / std::sqrt(n));
  // Standard errors of the higher sample moments under near-normality.
  EXPECT_LT(std::abs(s.variance - e.variance), 3.0 * e.variance * std::sqrt((e.kurtosis - 1.0) / n));
  EXPECT_LT(std::abs(s.skewness - e.skewness), 3.0 * std::sqrt(6.0 / n));
  EXPECT_LT(std::abs(s.kurtosis - e.kurtosis), 3.0 * std::sqrt(24.0 / n));
}

TEST(Sampling, DoublingDoesNotMoveTheMean) {
  const CostMatrix c = materialize_costs(generate_random(30, 8));
  const MomentSet a = sample_moments(c, 100000, 3), b = sample_moments(c, 200000, 3);
  const double se = std::sqrt(a.variance / 100000.0);
  EXPECT_LT(std::abs(a.mean - b.mean), 4.0 * se);
}

TEST(Sampling, UniformOverCanonicalTours) {
  const std::size_t n = 5;
  std::map<std::vector<Node>, int> counts;
  const int draws = 24000;
  for (int s = 0; s < draws; ++s) {
    const Tour t = sample_tour(n, 4, static_cast<std::uint64_t>(s));
    ASSERT_TRUE(t.is_canonical());
    ++counts[t.order];
  }
  ASSERT_EQ(counts.size(), 12u);
  double chi2 = 0;
  for (const auto& [k, v] : counts) chi2 += (v - 2000.0) * (v - 2000.0) / 2000.0;
  EXPECT_LT(chi2, 31.3);  // chi-square 11 dof, p = 0.001
}

TEST(Accumulator, MergeIsOrderIndependent) {
  MomentAccumulator all, a, b;
  CounterRng rng(1, 2);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = 1e6 + rng.uniform();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 3000 ? a : b).add(xs[i]);
  }
  MomentAccumulator ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  const MomentSet m0 = all.finish(MomentBasis::sampled), m1 = ab.finish(MomentBasis::sampled),
                  m2 = ba.finish(MomentBasis::sampled);
  EXPECT_LT(rel(m1.variance, m0.variance), 1e-9);
  EXPECT_LT(rel(m2.variance, m0.variance), 1e-9);
  EXPECT_NEAR(m1.skewness, m0.skewness, 1e-6);
  EXPECT_NEAR(m2.kurtosis, m0.kurtosis, 1e-6);
}

TEST(Histogram, Examples) {
  const Histogram empty = histogram(std::vector<double>{}, 4, 0.0, 1.0);
  EXPECT_EQ(empty.total, 0u);
  for (auto c : empty.counts) EXPECT_EQ(c, 0u);
  for (auto d : empty.density()) EXPECT_EQ(d, 0.0);

  const Histogram one = histogram(std::vector<double>{0.5}, 4, 0.0, 1.0);
  EXPECT_EQ(std::accumulate(one.counts.begin(), one.counts.end(), std::uint64_t{0}), 1u);
  EXPECT_EQ(one.counts[2], 1u);

  const Histogram clamped = histogram(std::vector<double>{-5.0, 0.0, 1.0, 7.0}, 2, 0.0, 1.0);
  EXPECT_EQ(clamped.counts[0], 2u);
  EXPECT_EQ(clamped.counts[1], 2u);
  EXPECT_THROW(histogram(std::vector<double>{}, 1, 0.0, 1.0), DomainError);
  EXPECT_THROW(histogram(std::vector<double>{}, 3, 1.0, 1.0), DomainError);
}

TEST(Histogram, EnumeratedTwelveNodeDensityIsBellShaped) {
  const CostMatrix c = materialize_costs(generate_random(12, 7));
  const MomentSet m = enumerate_tours(c);
  HistogramBuilder b(60, *m.min, *m.max);
  enumerate_tours(c, b);
  const Histogram h = b.finish();
  EXPECT_EQ(h.total, canonical_tour_count(12));
  for (std::size_t i = 0; i + 1 < h.bin_edges.size(); ++i) EXPECT_LT(h.bin_edges[i], h.bin_edges[i + 1]);
  const auto d = h.density();
  double integral = 0;
  for (std::size_t i = 0; i < d.size(); ++i) integral += d[i] * (h.bin_edges[i + 1] - h.bin_edges[i]);
  EXPECT_NEAR(integral, 1.0, 1e-12);
  const auto peak = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
  EXPECT_GT(peak, 10u);
  EXPECT_LT(peak, 50u);
  EXPECT_LT(d.front(), 0.05 * d[peak]);
  EXPECT_LT(d.back(), 0.05 * d[peak]);
}
