#include <random>

#include "alcsheaf/gralg.hpp"
#include "doctest.h"

using namespace alcsheaf;

namespace {

template <class K>
Element<K> elem(int degree, std::vector<Poly<K>> coords) {
  return Element<K>{degree, std::move(coords)};
}

template <class K>
Poly<K> x(int i) {
  Exponents e{0, 0, 0};
  e[i] = 1;
  return Poly<K>::monomial(e);
}

template <class K>
Submodule<K> free_module(int nvars, std::vector<int> degrees) {
  std::vector<Element<K>> gens;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    Element<K> e{degrees[i], std::vector<Poly<K>>(degrees.size())};
    e.coords[i] = Poly<K>(K(1));
    gens.push_back(e);
  }
  return Submodule<K>(nvars, degrees, gens);
}

}  // namespace

TEST_CASE("rank series formatting") {
  RankSeries r = RankSeries::monomial(0) + RankSeries::monomial(2, 2) + RankSeries::monomial(-1);
  CHECK(r.str() == "v^-1 + 1 + 2*v^2");
  CHECK(RankSeries::parse(r.str()) == r);
  CHECK(RankSeries::parse("0").is_zero());
  CHECK(RankSeries::parse("v^1 + v^-1") == RankSeries::monomial(1) + RankSeries::monomial(-1));
  CHECK((RankSeries::monomial(1) + RankSeries::monomial(-1)) * RankSeries::monomial(0, 3) ==
        RankSeries::parse("3*v^-1 + 3*v^1"));
}

TEST_CASE("polynomial arithmetic") {
  using P = Poly<Rational>;
  P a = x<Rational>(0) + x<Rational>(1), b = x<Rational>(0) - x<Rational>(1);
  P prod = a * b;
  CHECK(prod == x<Rational>(0).pow(2) - x<Rational>(1).pow(2));
  CHECK(prod.degree() == 4);
  CHECK(prod.is_homogeneous());
  CHECK((a - a).is_zero());
  CHECK(P::linear_form(std::vector<long>{2, -1}).str() == "-x2 + 2*x1");
}

TEST_CASE("degree slices") {
  auto s1 = free_module<Rational>(1, {0});
  CHECK(degree_slice(s1, 4).size() == 1);
  auto s2 = free_module<Rational>(2, {0});
  CHECK(degree_slice(s2, 4).size() == 3);
  CHECK(degree_slice(s2, 3).size() == 0);
  Submodule<Rational> zero(2, {0, 0});
  for (int d = 0; d < 6; ++d) CHECK(degree_slice(zero, d).empty());
}

TEST_CASE("graded kernels") {
  using K = Rational;
  // Multiplication by a linear form S[-2] -> S is injective.
  GradedMatrix<K> f{1, {0}, {2}, {elem<K>(2, {x<K>(0).scaled(K(2))})}};
  CHECK(f.homogeneous());
  CHECK(graded_kernel(f, 12).is_zero());

  // The congruence z_A = z_B mod a: kernel of (a, b, c) -> a - b - alpha c.
  Poly<K> alpha = Poly<K>::linear_form(std::vector<long>{2, -1});
  GradedMatrix<K> g{2, {0}, {0, 0, 2},
                    {elem<K>(0, {Poly<K>(K(1))}), elem<K>(0, {Poly<K>(K(-1))}), elem<K>(2, {-alpha})}};
  auto ker = graded_kernel(g, 10).project({0, 1});
  CHECK(ker.rank_series() == RankSeries::parse("1 + v^2"));
  CHECK(ker.contains(elem<K>(0, {Poly<K>(K(1)), Poly<K>(K(1))})));
  CHECK(ker.contains(elem<K>(2, {alpha, Poly<K>()})));

  // Kernel of the first projection is the second summand.
  GradedMatrix<K> p{2, {0}, {0, 0}, {elem<K>(0, {Poly<K>(K(1))}), elem<K>(0, {Poly<K>()})}};
  auto kp = graded_kernel(p, 8);
  CHECK(kp.rank_series() == RankSeries::parse("1"));
  CHECK(kp.contains(elem<K>(0, {Poly<K>(), Poly<K>(K(1))})));

  // The kernel composed with the map vanishes.
  auto full = graded_kernel(g, 10);
  for (const auto& k : full.generators()) {
    Poly<K> img = k.coords[0] - k.coords[1] - alpha * k.coords[2];
    CHECK(img.is_zero());
  }
}

TEST_CASE("sums and intersections") {
  using K = ModP;
  ModP::Scope scope(5);
  Submodule<K> m(2, {0, 0}, {elem<K>(0, {Poly<K>(K(1)), Poly<K>(K(1))})});
  Submodule<K> n(2, {0, 0}, {elem<K>(0, {Poly<K>(K(1)), Poly<K>(K(-1))})});
  CHECK(module_sum(m, n).rank_series() == RankSeries::parse("2"));
  CHECK(module_intersection(m, n, 10).is_zero());
  CHECK(module_intersection(m, m, 10).rank_series() == m.rank_series());
  CHECK(module_intersection(m, Submodule<K>(2, {0, 0}), 10).is_zero());
}

TEST_CASE("rank series of shifted free modules") {
  using K = Rational;
  CHECK(free_module<K>(2, {0}).rank_series() == RankSeries::parse("1"));
  CHECK(free_module<K>(2, {2}).rank_series() == RankSeries::parse("v^2"));
  CHECK(free_module<K>(2, {-1, 1}).rank_series() == RankSeries::parse("v^-1 + v^1"));
  auto m = free_module<K>(2, {0, 2, 4});
  for (int l = -2; l <= 2; ++l) CHECK(m.shifted(l).rank_series() == m.rank_series().shifted(-l));
}

TEST_CASE("non-free modules are not certified") {
  using K = Rational;
  // The maximal ideal in two variables.
  Submodule<K> ideal(2, {0}, {elem<K>(2, {x<K>(0)}), elem<K>(2, {x<K>(1)})});
  CHECK_FALSE(ideal.free_basis().has_value());
  CHECK_THROWS(ideal.rank_series());
  // Two generators that are dependent over the fraction field.
  Submodule<K> dep(2, {0, 0}, {elem<K>(2, {x<K>(0), x<K>(1)}), elem<K>(4, {x<K>(0) * x<K>(1), x<K>(1) * x<K>(1)}) });
  CHECK(dep.minimal().generators().size() == 1);
  ModP::Scope scope(3);
  using F = ModP;
  Submodule<F> idealp(2, {0}, {elem<F>(2, {x<F>(0)}), elem<F>(2, {x<F>(1)})});
  CHECK_FALSE(idealp.free_basis().has_value());
}

TEST_CASE("random free modules: dimensions match their rank series") {
  std::mt19937 rng(23);
  ModP::Scope scope(5);
  using K = ModP;
  for (int trial = 0; trial < 20; ++trial) {
    // Upper triangular generators with unit diagonal are a basis.
    const int n = 3;
    std::vector<int> amb{0, 0, 0};
    std::vector<Element<K>> gens;
    for (int i = 0; i < n; ++i) {
      int d = 2 * static_cast<int>(rng() % 3);
      Element<K> e{d, std::vector<Poly<K>>(n)};
      e.coords[i] = Poly<K>(K(1)).times(monomials(2, d / 2)[rng() % (d / 2 + 1)]);
      for (int j = i + 1; j < n; ++j)
        for (const auto& mu : monomials(2, d / 2)) e.coords[j] += Poly<K>::monomial(mu, K(static_cast<long>(rng() % 5)));
      gens.push_back(e);
    }
    Submodule<K> m(2, amb, gens);
    auto basis = m.free_basis();
    REQUIRE(basis.has_value());
    RankSeries r = m.rank_series();
    for (int d = 0; d <= 10; d += 2) {
      long predicted = 0;
      for (auto [e, c] : r.terms()) predicted += c * monomial_count(2, (d - e) / 2) * ((d - e) % 2 == 0);
      CHECK(m.dim(d) == predicted);
    }
    SliceLayout layout(2, amb, 6);
    for (const auto& v : degree_slice(m, 6)) {
      auto coeffs = basis_coefficients(*basis, amb, 2, from_dense<K>(v, layout, n));
      REQUIRE(coeffs.has_value());
      Element<K> back{6, std::vector<Poly<K>>(n)};
      for (std::size_t i = 0; i < basis->size(); ++i)
        if (!(*coeffs)[i].is_zero()) back = back + (*basis)[i].scaled((*coeffs)[i]);
      CHECK(back == from_dense<K>(v, layout, n));
    }
  }
}

TEST_CASE("nullspace") {
  using K = Rational;
  std::vector<std::vector<K>> a{{K(1), K(2), K(3)}, {K(2), K(4), K(6)}};
  auto ns = nullspace(a, 3);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) CHECK((a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2]).is_zero());
}
