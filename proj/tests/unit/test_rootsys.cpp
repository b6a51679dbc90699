#include <random>

#include "alcsheaf/rootsys.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace alcsheaf;

TEST_CASE("root system sizes") {
  struct Row { const char* label; int positive; int order; };
  for (auto [label, positive, order] :
       {Row{"A1", 1, 2}, Row{"A2", 3, 6}, Row{"B2", 4, 8}, Row{"C2", 4, 8}, Row{"G2", 6, 12},
        Row{"A3", 6, 24}, Row{"B3", 9, 48}, Row{"C3", 9, 48}, Row{"D3", 6, 24}}) {
    CAPTURE(label);
    RootSystem rs = make_root_system(label);
    CHECK(rs.num_positive() == positive);
    CHECK(rs.order() == order);
    CHECK(rs.length(rs.longest()) == positive);
  }
}

TEST_CASE("cartan data agrees with the reference table") {
  for (const char* label : {"A2", "B2", "C2", "G2", "A3", "B3", "C3"}) {
    CAPTURE(label);
    RootSystem rs = make_root_system(label);
    auto c = oracle::cartan(label);
    for (int i = 0; i < rs.rank(); ++i)
      for (int j = 0; j < rs.rank(); ++j) CHECK(rs.pairing()[j][i] == c[i][j]);
  }
}

TEST_CASE("coroot forms pair roots correctly") {
  for (const char* label : {"A2", "B2", "G2", "B3", "C3"}) {
    RootSystem rs = make_root_system(label);
    for (int a = 0; a < rs.num_positive(); ++a) CHECK(rs.pair(rs.root(a), a) == 2);
    int theta = rs.highest_coroot_root();
    for (int a = 0; a < rs.num_positive(); ++a)
      for (int i = 0; i < rs.rank(); ++i) CHECK(rs.coroot(a)[i] <= rs.coroot(theta)[i]);
  }
}

TEST_CASE("weyl group multiplication") {
  RootSystem rs = make_root_system("B3");
  for (int x = 0; x < rs.order(); ++x) {
    CHECK(rs.mul(x, rs.inv(x)) == rs.identity());
    CHECK(rs.matrix(x) == oracle::word_matrix(oracle::cartan("B3"), rs.word(x)));
  }
}

TEST_CASE("gkm condition") {
  RootSystem a2 = make_root_system("A2");
  CHECK(gkm_check(a2, 0));
  CHECK(gkm_check(a2, 5));
  CHECK_FALSE(gkm_check(a2, 3));
  for (const char* label : {"A1", "A2", "B2", "G2", "A3"}) CHECK_FALSE(gkm_check(make_root_system(label), 2));
  CHECK(gkm_check(make_root_system("B2"), 5));
  CHECK(gkm_check(make_root_system("A1"), 3));
}

TEST_CASE("affine reflections") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> d(-6, 6);
  for (const char* label : {"A1", "A2", "B2", "G2", "C3"}) {
    RootSystem rs = make_root_system(label);
    const int r = rs.rank();
    for (int trial = 0; trial < 40; ++trial) {
      int a = static_cast<int>(rng() % rs.num_positive());
      long n = d(rng), m = d(rng);
      IVec lambda(r);
      for (auto& x : lambda) x = d(rng);
      AffineMap sn = affine_reflection(rs, a, n), sm = affine_reflection(rs, a, m);
      CHECK(sn.compose(sn) == AffineMap::identity(r));
      IVec shift = rs.root(a);
      for (auto& x : shift) x *= (n - m);
      CHECK(sn.compose(sm) == AffineMap::translation(shift));
      AffineMap s0 = affine_reflection(rs, a, 0);
      CHECK(sn.compose(AffineMap::translation(lambda)) ==
            AffineMap::translation(s0.apply(lambda)).compose(sn));
      // The hyperplane <x, a^v> = n is fixed pointwise.
      IVec x(r);
      for (auto& v : x) v = d(rng);
      IVec y = sn.apply(x);
      CHECK(rs.pair(y, a) == 2 * n - rs.pair(x, a));
    }
  }
}

TEST_CASE("bad labels are rejected") {
  CHECK_THROWS(make_root_system("E8"));
  CHECK_THROWS(make_root_system("A4"));
  CHECK_THROWS(make_root_system("G3"));
  CHECK_THROWS(make_root_system("x"));
}
