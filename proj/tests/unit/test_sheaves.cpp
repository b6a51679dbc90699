#include <random>

#include "alcsheaf/sheaves.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace alcsheaf;

namespace {

AlcoveGeometry geometry(const char* label) { return AlcoveGeometry(make_root_system(label)); }

// Number of reflections through lambda that take a below itself.
int reflections_below(const AlcoveGeometry& g, const Weight& lambda, const Alcove& a) {
  int count = 0;
  for (int r = 0; r < g.roots().num_positive(); ++r) {
    long n = 0;
    for (int i = 0; i < g.rank(); ++i) n += lambda[i] * g.roots().coroot(r)[i];
    if (g.leq(g.reflect(a, r, n), a)) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("standard sheaves") {
  auto g = geometry("A1");
  Alcove a = g.special_minus({0});
  auto v = standard_sheaf<Rational>(g, a);
  CHECK(sections(g, v, down_set(g, a)).certified_rank == RankSeries::parse("1"));
  CHECK(sections(g, v, strict_down_set(g, a)).module.is_zero());
  CHECK(subquotient(g, v, {a}).certified_rank == RankSeries::parse("1"));
  CHECK(v.support() == std::vector<Alcove>{a});
  CHECK(verma_ranks(g, v) == VermaTable{{a, RankSeries::parse("1")}});
  CHECK(certify_category_C(g, v).all());
}

TEST_CASE("section sheaf in A1") {
  auto g = geometry("A1");
  FlabbyReport rep;
  auto k = section_sheaf<Rational>(g, {0}, true, &rep);
  CHECK(rep.ok);
  CHECK(rep.ideals_checked == 2);
  Alcove lo = g.special_minus({0}), hi = g.special_plus({0});
  VermaTable t = verma_ranks(g, k);
  CHECK(t == VermaTable{{lo, RankSeries::parse("1")}, {hi, RankSeries::parse("v^2")}});
  CHECK(subquotient(g, k, {g.alpha_down(lo, 0)}).module.is_zero());
}

TEST_CASE("section sheaf subquotients are S[-2 l_A]") {
  for (const char* label : {"A1", "A2", "B2"}) {
    CAPTURE(label);
    auto g = geometry(label);
    for (Weight lambda : {Weight(g.rank(), 0), Weight(g.rank(), 1)}) {
      auto k = section_sheaf<Rational>(g, lambda);
      VermaTable t = verma_ranks(g, k);
      CHECK(t.size() == static_cast<std::size_t>(g.roots().order()));
      std::vector<int> counts(g.roots().num_positive() + 1, 0);
      for (int x = 0; x < g.roots().order(); ++x) {
        Alcove a = g.tau(lambda, x);
        int l = reflections_below(g, lambda, a);
        CHECK(l == g.roots().length(x));
        CHECK(t[a] == RankSeries::monomial(2 * l));
        ++counts[l];
      }
      CHECK(counts == oracle::length_counts(oracle::cartan(label)));
    }
  }
}

TEST_CASE("section sheaf flabbiness over a finite field") {
  ModP::Scope scope(5);
  for (const char* label : {"A2", "B2"}) {
    auto g = geometry(label);
    FlabbyReport rep;
    section_sheaf<ModP>(g, Weight(g.rank(), 0), true, &rep);
    CHECK(rep.ok);
    CHECK(rep.ideals_checked > g.roots().order());
  }
}

TEST_CASE("subquotient routes agree") {
  auto g = geometry("A2");
  auto k = section_sheaf<Rational>(g, {0, 0});
  for (const auto& a : k.support()) {
    auto one = subquotient(g, k, {a}, SubquotientRoute::down_closure);
    auto two = subquotient(g, k, {a}, SubquotientRoute::complement_of_strict_up);
    REQUIRE(one.certified_rank);
    CHECK(one.certified_rank == two.certified_rank);
    for (const auto& x : one.module.generators()) CHECK(two.module.contains(x));
    for (const auto& x : two.module.generators()) CHECK(one.module.contains(x));
  }
  Alcove lo = g.special_minus({0, 0});
  auto far = subquotient(g, k, {g.translate(lo, {5, 5})});
  CHECK(far.module.is_zero());
}

TEST_CASE("subquotient rejects sets that are not locally closed") {
  auto g = geometry("A1");
  auto k = section_sheaf<Rational>(g, {0});
  Alcove lo = g.special_minus({0}), hi = g.special_plus({0});
  Alcove below = g.alpha_down(lo, 0), above = g.alpha_up(hi, 0);
  CHECK_THROWS_AS(subquotient(g, k, {below, above}), std::invalid_argument);
  CHECK(subquotient(g, k, {lo, hi}).certified_rank == RankSeries::parse("1 + v^2"));
}

TEST_CASE("sections depend only on the trace on the support") {
  auto g = geometry("A2");
  auto k = section_sheaf<Rational>(g, {0, 0});
  Window w = Window::around(g, g.special_minus({0, 0}), 1);
  int checked = 0;
  for (const auto& ideal : w.ideals(4096)) {
    std::vector<Alcove> in, trace;
    for (int i = 0; i < w.size(); ++i)
      if (ideal[i]) in.push_back(w[i]);
    for (const auto& a : k.support())
      if (std::find(in.begin(), in.end(), a) != in.end()) trace.push_back(a);
    auto s1 = sections(g, k, member_of(in));
    auto s2 = sections(g, k, member_of(trace));
    CHECK(s1.certified_rank == s2.certified_rank);
    CHECK(s1.labels == s2.labels);
    if (++checked == 200) break;
  }
  CHECK(checked > 20);
}

TEST_CASE("hom spaces") {
  auto g = geometry("A1");
  Alcove lo = g.special_minus({0}), hi = g.special_plus({0});
  auto va = standard_sheaf<Rational>(g, lo), vb = standard_sheaf<Rational>(g, hi);
  CHECK(hom_space(g, va, va, 0).size() == 1);
  CHECK(hom_space(g, va, vb, 0).empty());
  CHECK(hom_space(g, vb, va, 0).empty());
  CHECK(hom_space(g, va, va, 2).size() == 1);
  CHECK(hom_space(g, va, va, -2).empty());
  auto k = section_sheaf<Rational>(g, {0});
  auto epi = hom_space(g, k, va, 0);
  REQUIRE(epi.size() == 1);
  CHECK(is_morphism(g, k, va, epi[0]));
  CHECK(hom_space(g, k, vb, 0).size() == 1);
  CHECK(hom_space(g, k, vb, 2).size() == 1);
  CHECK(hom_space(g, k, vb, -2).empty());
  auto endo = hom_space(g, k, k, 0);
  CHECK(endo.size() == 1);

  // Standard objects of comparable alcoves in one orbit have a morphism upward.
  Alcove up = g.translate(lo, {1});
  REQUIRE(g.less(lo, up));
  auto vu = standard_sheaf<Rational>(g, up);
  CHECK(hom_space(g, va, vu, 0).size() == 1);
  CHECK(hom_space(g, vu, va, 0).empty());
}

TEST_CASE("hom space of the A2 section sheaf onto its minimum") {
  auto g = geometry("A2");
  auto k = section_sheaf<Rational>(g, {0, 0});
  Alcove lo = g.special_minus({0, 0});
  auto v = standard_sheaf<Rational>(g, lo);
  auto f = hom_space(g, k, v, 0);
  REQUIRE(f.size() == 1);
  CHECK(is_morphism(g, k, v, f[0]));
  CHECK(hom_space(g, k, k, 0).size() == 1);
  // The unit section is not the image of a Z-linear map out of V(A).
  Element<Rational> unit{0, std::vector<Poly<Rational>>(k.ncoords(), Poly<Rational>(Rational(1)))};
  CHECK_FALSE(is_morphism(g, v, k, Morphism<Rational>{0, {unit}}));
  CHECK(hom_space(g, v, k, 0).empty());
}

TEST_CASE("exact sequences") {
  auto g = geometry("A1");
  auto k = section_sheaf<Rational>(g, {0});
  Alcove lo = g.special_minus({0});
  AlcoveSet j = down_set(g, lo);
  auto open = open_part(g, k, j);
  auto closed = closed_part(g, k, j);
  CHECK(verma_ranks(g, closed) == VermaTable{{g.special_plus({0}), RankSeries::parse("v^2")}});
  auto inc = inclusion_morphism(g, closed, k, j);
  auto res = restriction_morphism(g, k, j);
  CHECK(is_morphism(g, closed, k, inc));
  CHECK(is_morphism(g, k, open, res));
  CHECK(check_exact(g, closed, inc, k, res, open).exact);

  auto zero = zero_sheaf<Rational>(g);
  CHECK(check_exact(g, zero, zero_morphism(zero, k, 0), k, identity_morphism(k), k).exact);

  // The zero map onto a nonzero target is not surjective.
  CHECK_FALSE(check_exact(g, zero, zero_morphism(zero, k, 0), k, zero_morphism(k, open, 0), open).exact);
  // Dropping the kernel breaks exactness in the middle.
  CHECK_FALSE(check_exact(g, zero, zero_morphism(zero, k, 0), k, res, open).exact);
}

TEST_CASE("exact sequences in A2 on random open sets") {
  auto g = geometry("A2");
  auto k = section_sheaf<Rational>(g, {0, 0});
  Window w = Window::of(g, k.support());
  auto ideals = w.ideals();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const auto& ideal = ideals[rng() % ideals.size()];
    std::vector<Alcove> in;
    for (int i = 0; i < w.size(); ++i)
      if (ideal[i]) in.push_back(w[i]);
    AlcoveSet j = member_of(in);
    auto open = open_part(g, k, j);
    auto closed = closed_part(g, k, j);
    auto inc = inclusion_morphism(g, closed, k, j);
    auto res = restriction_morphism(g, k, j);
    CHECK(check_exact(g, closed, inc, k, res, open).exact);
    CHECK(certify_category_C(g, open).all());
    CHECK(certify_category_C(g, closed).all());
  }
}

TEST_CASE("category C certification") {
  auto g = geometry("A2");
  auto k = section_sheaf<Rational>(g, {0, 0});
  auto rep = certify_category_C(g, k);
  CHECK(rep.all());

  // The diagonal on two alcoves in different strings for every root.
  Alcove a = g.fundamental();
  Alcove b = g.translate(a, {1, 0});
  b = g.translate(b, {0, 3});
  Element<Rational> diag{0, {Poly<Rational>(Rational(1)), Poly<Rational>(Rational(1))}};
  auto bad = make_sheaf<Rational>(g, {a, b}, {0, 0}, {diag});
  auto brep = certify_category_C(g, bad);
  CHECK_FALSE(brep.local_extension.pass);
  CHECK_FALSE(brep.local_extension.witness.empty());

  ModP::Scope scope(5);
  auto kp = section_sheaf<ModP>(g, {0, 0});
  CHECK(certify_category_C(g, kp).all());
}

TEST_CASE("verma table export") {
  auto g = geometry("A1");
  auto k = section_sheaf<Rational>(g, {0});
  VermaTable t = verma_ranks(g, k);
  std::string json = verma_json(g, t);
  CHECK(json.find("v^2") != std::string::npos);
  std::string csv = verma_csv(g, t);
  CHECK(csv.rfind("alcove,coordinates,rank\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(shifted(t, 1).at(g.special_minus({0})) == RankSeries::parse("v"));
}
