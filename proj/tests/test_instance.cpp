#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tgbtsp/instance.hpp"
#include "tgbtsp/serialize.hpp"
#include "tgbtsp/tour.hpp"

using namespace tgbtsp;

namespace {

std::string data_path(const std::string& name) { return std::string(TGBTSP_DATA_DIR) + "/" + name; }

Instance load(const std::string& name) {
  std::ifstream f(data_path(name));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_tsplib(ss.str());
}

const char* kTriangle =
    "NAME : tri\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"
    "NODE_COORD_SECTION\n1 0 0\n2 3 0\n3 0 4\nEOF\n";

template <class Fn>
std::string error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return "none";
}

}  // namespace

TEST(Parse, Burma14IsGeographic) {
  const Instance inst = load("burma14.tsp");
  EXPECT_EQ(inst.name, "burma14");
  EXPECT_EQ(inst.n, 14u);
  EXPECT_EQ(inst.geometry, Geometry::geographic);
  EXPECT_DOUBLE_EQ(inst.coords[0].x, 16.47);
  EXPECT_DOUBLE_EQ(inst.coords[0].y, 96.10);
}

TEST(Parse, Ulysses22IsGeographic) {
  const Instance inst = load("ulysses22.tsp");
  EXPECT_EQ(inst.n, 22u);
  EXPECT_EQ(inst.geometry, Geometry::geographic);
}

TEST(Parse, Berlin52IsEuclidean) {
  const Instance inst = load("berlin52.tsp");
  EXPECT_EQ(inst.n, 52u);
  EXPECT_EQ(inst.geometry, Geometry::euclidean_2d);
  EXPECT_TRUE(inst.round_euclidean);
}

TEST(Parse, PythagoreanTriangle) {
  const CostMatrix c = materialize_costs(parse_tsplib(kTriangle));
  EXPECT_EQ(c(0, 1), 3.0);
  EXPECT_EQ(c(0, 2), 4.0);
  EXPECT_EQ(c(1, 2), 5.0);
}

TEST(Parse, ExplicitLayoutsAgree) {
  const std::string head = "NAME : x\nTYPE : TSP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EXPLICIT\n";
  const auto full = parse_tsplib(head +
                                 "EDGE_WEIGHT_FORMAT : FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
                                 "0 1 2 3\n1 0 4 5\n2 4 0 6\n3 5 6 0\nEOF\n");
  const auto lower = parse_tsplib(head +
                                  "EDGE_WEIGHT_FORMAT : LOWER_DIAG_ROW\nEDGE_WEIGHT_SECTION\n"
                                  "0\n1 0\n2 4 0\n3 5 6 0\nEOF\n");
  const auto upper = parse_tsplib(head +
                                  "EDGE_WEIGHT_FORMAT : UPPER_ROW\nEDGE_WEIGHT_SECTION\n"
                                  "1 2 3\n4 5\n6\nEOF\n");
  EXPECT_EQ(full.geometry, Geometry::explicit_matrix);
  EXPECT_EQ(full.explicit_costs, lower.explicit_costs);
  EXPECT_EQ(full.explicit_costs, upper.explicit_costs);
  EXPECT_EQ(full.explicit_costs(2, 3), 6.0);
}

TEST(Parse, DistinctDiagnostics) {
  const std::string ok = "NAME : x\nTYPE : TSP\nDIMENSION : 3\n";
  EXPECT_EQ(error_kind([] { parse_tsplib("NAME x\nTYPE : TSP\n"); }), "malformed-header");
  EXPECT_EQ(error_kind([&] { parse_tsplib(ok + "EDGE_WEIGHT_TYPE : ATT\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n3 2 2\nEOF\n"); }),
            "unsupported-edge-weight-type");
  EXPECT_EQ(error_kind([&] { parse_tsplib(ok + "EDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n"); }),
            "dimension-mismatch");
  EXPECT_EQ(error_kind([&] {
              parse_tsplib(ok + "EDGE_WEIGHT_TYPE : EXPLICIT\nEDGE_WEIGHT_FORMAT : FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
                                "0 1 2\n9 0 3\n2 3 0\nEOF\n");
            }),
            "non-symmetric-matrix");
  EXPECT_EQ(error_kind([] { parse_tsplib("NAME : x\nTYPE : ATSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"); }),
            "unsupported-type");
  EXPECT_EQ(error_kind([&] { parse_tsplib(ok + "EDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 a b\n3 1 1\nEOF\n"); }),
            "malformed-coordinates");
}

TEST(Distance, EuclideanRoundsToNearest) {
  Instance inst;
  inst.n = 3;
  inst.geometry = Geometry::euclidean_2d;
  inst.coords = {{0, 0}, {3, 4}, {1, 1}};
  EXPECT_EQ(distance(inst, 0, 1), 5.0);
  EXPECT_EQ(distance(inst, 0, 2), 1.0);  // sqrt(2) -> 1
  EXPECT_EQ(distance(inst, 1, 1), 0.0);
  EXPECT_EQ(error_kind([&] { distance(inst, 0, 3); }), "index-out-of-range");
  inst.round_euclidean = false;
  EXPECT_DOUBLE_EQ(distance(inst, 0, 2), std::sqrt(2.0));
}

TEST(Distance, GeographicIdentityTourOfBurma14) {
  // Identity order 1..14 evaluated once with an independent scalar
  // implementation of the TSPLIB GEO formula.
  const CostMatrix c = materialize_costs(load("burma14.tsp"));
  std::vector<Node> order(14);
  std::iota(order.begin(), order.end(), 0);
  EXPECT_EQ(tour_length(order, c), 4562.0);
}

TEST(Distance, GeographicKnownPair) {
  // Nodes 1 and 2 of burma14: 16.47N 96.10E to 16.47N 94.44E.
  const CostMatrix c = materialize_costs(load("burma14.tsp"));
  EXPECT_EQ(c(0, 1), 153.0);
}

TEST(CostMatrix, ValidatesInvariants) {
  EXPECT_EQ(error_kind([] { CostMatrix(2, {0, 1, 2, 0}); }), "non-symmetric-matrix");
  EXPECT_EQ(error_kind([] { CostMatrix(2, {1, 1, 1, 0}); }), "invalid-diagonal");
  EXPECT_EQ(error_kind([] { CostMatrix(2, {0, -1, -1, 0}); }), "negative-cost");
  EXPECT_EQ(error_kind([] { CostMatrix(2, {0, 1, 1}); }), "dimension-mismatch");
}

TEST(CostMatrix, GeometricInstancesAreSymmetricWithZeroDiagonal) {
  for (const char* name : {"burma14.tsp", "ulysses16.tsp", "ulysses22.tsp", "berlin52.tsp"}) {
    const CostMatrix c = materialize_costs(load(name));
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_EQ(c(i, i), 0.0);
      for (std::size_t j = 0; j < c.size(); ++j) ASSERT_EQ(c(i, j), c(j, i));
    }
  }
}

TEST(CostMatrix, TriangleInequalityWithinRoundingSlack) {
  for (const char* name : {"burma14.tsp", "ulysses22.tsp", "berlin52.tsp"}) {
    EXPECT_EQ(triangle_violations(materialize_costs(load(name)), 1.0), 0u) << name;
  }
  EXPECT_EQ(triangle_violations(materialize_costs(generate_random(30, 5)), 1e-12), 0u);
}

TEST(Generate, DeterministicUnitSquare) {
  const Instance a = generate_random(12, 7), b = generate_random(12, 7), c = generate_random(12, 8);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_NE(a.coords, c.coords);
  EXPECT_FALSE(a.round_euclidean);
  for (const auto& p : a.coords) {
    EXPECT_GE(p.x, 0.0);
    EXPECT_LT(p.x, 1.0);
    EXPECT_GE(p.y, 0.0);
    EXPECT_LT(p.y, 1.0);
  }
  EXPECT_EQ(error_kind([] { generate_random(2, 1); }), "too-few-nodes");
}

TEST(TransformMax, TriangleExample) {
  const MaxTransform t = transform_max(CostMatrix(3, {0, 3, 4, 3, 0, 5, 4, 5, 0}));
  EXPECT_EQ(t.big_m, 6.0);
  EXPECT_EQ(t.costs(0, 1), 3.0);
  EXPECT_EQ(t.costs(0, 2), 2.0);
  EXPECT_EQ(t.costs(1, 2), 1.0);
  EXPECT_EQ(t.costs(1, 1), 0.0);
}

TEST(TransformMax, AllEqualCostsBecomeOne) {
  std::vector<double> v(25, 4.0);
  for (int i = 0; i < 5; ++i) v[i * 6] = 0.0;
  const MaxTransform t = transform_max(CostMatrix(5, v));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(t.costs(i, j), i == j ? 0.0 : 1.0);
}

TEST(TransformMax, ReversesTourRanking) {
  for (std::size_t n : {5u, 6u, 7u, 8u}) {
    const CostMatrix c = materialize_costs(generate_random(n, 100 + n));
    const MaxTransform t = transform_max(c);
    std::vector<std::pair<double, double>> pairs;
    enumerate_tours(c, [&](std::span<const Node> order, double len) {
      pairs.emplace_back(len, tour_length(order, t.costs));
    });
    ASSERT_EQ(pairs.size(), canonical_tour_count(n));
    for (const auto& [orig, tr] : pairs) EXPECT_NEAR(t.recover(tr), orig, 1e-9);
    double max_orig = 0, min_tr = 1e300;
    for (const auto& [orig, tr] : pairs) {
      max_orig = std::max(max_orig, orig);
      min_tr = std::min(min_tr, tr);
    }
    EXPECT_NEAR(t.recover(min_tr), max_orig, 1e-9);
  }
}

TEST(Serialize, ExplicitRoundTrip) {
  const Instance a = load("burma14.tsp");
  Instance e;
  e.name = "burma14-explicit";
  e.n = a.n;
  e.geometry = Geometry::explicit_matrix;
  e.explicit_costs = materialize_costs(a);
  const Instance b = parse_tsplib(write_tsplib_explicit(e));
  EXPECT_EQ(b.explicit_costs, e.explicit_costs);

  const Instance r = generate_random(9, 3);
  Instance re;
  re.name = "r";
  re.n = r.n;
  re.geometry = Geometry::explicit_matrix;
  re.explicit_costs = materialize_costs(r);
  EXPECT_EQ(parse_tsplib(write_tsplib_explicit(re)).explicit_costs, re.explicit_costs);
}

TEST(Serialize, JsonRoundTrip) {
  for (const Instance& inst : {generate_random(10, 4), load("burma14.tsp")}) {
    const Instance back = instance_from_json(to_json(inst));
    EXPECT_EQ(back.n, inst.n);
    EXPECT_EQ(back.geometry, inst.geometry);
    EXPECT_EQ(materialize_costs(back), materialize_costs(inst));
    EXPECT_EQ(instance_checksum(back), instance_checksum(inst));
  }
}
