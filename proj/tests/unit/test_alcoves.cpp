#include <random>
#include <set>

#include "alcsheaf/alcoves.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace alcsheaf;

namespace {

AlcoveGeometry geometry(const char* label) { return AlcoveGeometry(make_root_system(label)); }

Alcove random_alcove(const AlcoveGeometry& g, std::mt19937& rng, int spread = 3) {
  std::uniform_int_distribution<long> d(-spread, spread);
  Alcove a{static_cast<int>(rng() % g.roots().order()), IVec(g.rank())};
  for (auto& x : a.t) x = d(rng);
  return a;
}

}  // namespace

TEST_CASE("coordinates") {
  auto a1 = geometry("A1");
  CHECK(a1.coords(a1.fundamental()) == IVec{0});
  CHECK(a1.coords(Alcove{0, {2}}) == IVec{4});
  auto a2 = geometry("A2");
  CHECK(a2.coords(a2.fundamental()) == IVec{0, 0, 0});
  CHECK(a2.coords(a2.reflect(a2.fundamental(), 0, 0))[0] == -1);
  std::mt19937 rng(3);
  for (const char* label : {"A2", "B2", "G2", "A3"}) {
    auto g = geometry(label);
    for (int i = 0; i < 30; ++i) {
      Alcove a = random_alcove(g, rng);
      IVec b = g.bary(a);
      IVec k = g.coords(a);
      for (int r = 0; r < g.roots().num_positive(); ++r) {
        long p = g.roots().pair(b, r);
        CHECK(p > k[r] * g.scale());
        CHECK(p < (k[r] + 1) * g.scale());
      }
      CHECK(g.from_coords(k) == a);
      CHECK(g.from_bary(b) == a);
      CHECK(g.parse(g.format(a)) == a);
      CHECK(g.parse(g.format_coords(a)) == a);
    }
  }
}

TEST_CASE("right action") {
  auto a1 = geometry("A1");
  CHECK(a1.coords(a1.right_act(a1.fundamental(), 0)) == IVec{1});
  CHECK(a1.coords(a1.right_act(a1.fundamental(), 1)) == IVec{-1});
  std::mt19937 rng(5);
  for (const char* label : {"A2", "B2", "G2", "C3"}) {
    auto g = geometry(label);
    for (int i = 0; i < 20; ++i) {
      Alcove a = random_alcove(g, rng);
      for (Wall s = 0; s < g.num_walls(); ++s) {
        Alcove b = g.right_act(a, s);
        CHECK(g.right_act(b, s) == a);
        // Neighbouring alcoves differ in exactly one coordinate, by one.
        IVec ka = g.coords(a), kb = g.coords(b);
        int diffs = 0;
        for (std::size_t r = 0; r < ka.size(); ++r)
          if (ka[r] != kb[r]) {
            ++diffs;
            CHECK(std::abs(ka[r] - kb[r]) == 1);
          }
        CHECK(diffs == 1);
        CHECK(g.orbit(b) == g.orbit_right_act(g.orbit(a), s));
      }
    }
  }
}

TEST_CASE("alpha up") {
  auto a1 = geometry("A1");
  CHECK(a1.coords(a1.alpha_up(a1.fundamental(), 0)) == IVec{1});
  std::mt19937 rng(11);
  for (const char* label : {"A2", "B2", "G2"}) {
    auto g = geometry(label);
    CHECK(g.less(g.fundamental(), g.alpha_up(g.fundamental(), 0)));
    for (int i = 0; i < 20; ++i) {
      Alcove a = random_alcove(g, rng);
      for (int r = 0; r < g.roots().num_positive(); ++r) {
        Alcove up = g.alpha_up(a, r);
        CHECK(g.alpha_up(up, r) == g.translate(a, g.roots().root(r)));
        CHECK(g.alpha_down(up, r) == a);
        CHECK(g.compare(a, up) == Order::less);
      }
    }
  }
}

TEST_CASE("rank one order is the order of the coordinate") {
  auto g = geometry("A1");
  CHECK(g.compare(g.parse("0"), g.parse("3")) == Order::less);
  CHECK(g.compare(g.parse("3"), g.parse("0")) == Order::greater);
  CHECK(g.compare(g.parse("2"), g.parse("2")) == Order::equal);
  for (long a = -5; a <= 5; ++a)
    for (long b = -5; b <= 5; ++b) {
      Order expect = a < b ? Order::less : a > b ? Order::greater : Order::equal;
      CHECK(g.compare(g.from_coords({a}), g.from_coords({b})) == expect);
    }
  auto iv = g.interval(g.parse("0"), g.parse("2"));
  CHECK(iv.size() == 3);
  CHECK_THROWS(g.interval(g.parse("2"), g.parse("0")));
}

TEST_CASE("special section matches the bruhat order") {
  for (const char* label : {"A2", "B2", "G2", "A3"}) {
    CAPTURE(label);
    auto g = geometry(label);
    auto cartan = oracle::cartan(label == std::string("D3") ? "A3" : label);
    const auto& rs = g.roots();
    for (Weight lambda : {Weight(g.rank(), 0), Weight(g.rank(), 1)}) {
      auto k = g.special_section(lambda);
      CHECK(static_cast<int>(std::set<Alcove>(k.begin(), k.end()).size()) == rs.order());
      std::set<int> orbits;
      for (const auto& a : k) orbits.insert(g.orbit(a));
      CHECK(static_cast<int>(orbits.size()) == rs.order());
      for (int x = 0; x < rs.order(); ++x)
        for (int y = 0; y < rs.order(); ++y)
          CHECK(g.leq(g.tau(lambda, x), g.tau(lambda, y)) ==
                oracle::bruhat_leq(cartan, rs.word(x), rs.word(y)));
    }
  }
  auto a1 = geometry("A1");
  auto k0 = a1.special_section({0});
  CHECK(std::set<Alcove>(k0.begin(), k0.end()) == std::set<Alcove>{a1.parse("-1"), a1.parse("0")});
}

TEST_CASE("boxes and special alcoves") {
  auto a1 = geometry("A1");
  for (long n = -4; n <= 4; ++n) CHECK(a1.box_of(a1.from_coords({n})) == Weight{n + 1});
  for (const char* label : {"A2", "B2", "G2", "C3"}) {
    CAPTURE(label);
    auto g = geometry(label);
    CHECK(g.box_of(g.fundamental()) == Weight(g.rank(), 1));
    for (Weight lambda : {Weight(g.rank(), 0), Weight(g.rank(), -1)}) {
      Alcove top = g.special_minus(lambda);
      CHECK(g.box_of(top) == lambda);
      auto box = g.box(lambda);
      CHECK(static_cast<long>(box.size()) * 1 >= 1);
      for (const auto& a : box) {
        CHECK(g.box_of(a) == lambda);
        CHECK(g.leq(a, top));
      }
      Alcove plus = g.special_plus(lambda);
      CHECK(g.length(lambda, plus) == 0);
      CHECK(g.length(lambda, top) == g.roots().num_positive());
      auto k = g.special_section(lambda);
      CHECK(std::find(k.begin(), k.end(), plus) != k.end());
      for (const auto& a : k) CHECK(g.leq(top, a));
    }
  }
  auto a2 = geometry("A2");
  CHECK(a2.box({0, 0}).size() == 2);
  CHECK(geometry("B2").box({0, 0}).size() == 4);
}

TEST_CASE("special sections are translation equivariant") {
  auto g = geometry("B2");
  Weight lambda{2, -2};
  IVec shift = g.weight_to_roots(lambda);
  auto k0 = g.special_section({0, 0});
  auto kl = g.special_section(lambda);
  for (std::size_t i = 0; i < k0.size(); ++i) CHECK(g.translate(k0[i], shift) == kl[i]);
}

TEST_CASE("length") {
  auto a1 = geometry("A1");
  for (long n = -4; n <= 4; ++n) CHECK(a1.length({0}, a1.from_coords({n})) == -n);
  std::mt19937 rng(13);
  for (const char* label : {"A2", "B2", "G2"}) {
    auto g = geometry(label);
    for (int i = 0; i < 15; ++i) {
      Alcove a = random_alcove(g, rng);
      Weight lambda(g.rank());
      for (auto& x : lambda) x = static_cast<long>(rng() % 5) - 2;
      for (Wall s = 0; s < g.num_walls(); ++s) {
        Alcove b = g.right_act(a, s);
        if (g.less(a, b)) CHECK(g.length(lambda, b) == g.length(lambda, a) - 1);
      }
    }
  }
}

TEST_CASE("flat and sharp in rank one") {
  auto g = geometry("A1");
  Window win = Window::around(g, g.fundamental(), 4);
  Window::Subset j(win.size());
  for (int i = 0; i < win.size(); ++i) j[i] = g.coords(win[i])[0] <= 0;
  // Shrink to an s-closed part of the window.
  for (int i = 0; i < win.size(); ++i)
    if (!win.contains(g.right_act(win[i], 0))) j[i] = false;
  auto [flat, sharp] = win.flat_sharp(j, 0);
  for (int i = 0; i < win.size(); ++i) {
    long k = g.coords(win[i])[0];
    if (!j[i]) continue;
    CHECK(flat[i] == (k <= -1));
  }
  CHECK(sharp[*win.index(g.from_coords({1}))]);
  CHECK_FALSE(sharp[*win.index(g.from_coords({2}))]);
}

TEST_CASE("window order agrees with pairwise comparison") {
  for (const char* label : {"A2", "B2"}) {
    auto g = geometry(label);
    Window win = Window::around(g, g.fundamental(), 1);
    CHECK(win.interval_closed());
    Window pairwise = Window::of(g, win.alcoves());
    for (int i = 0; i < win.size(); ++i)
      for (int j = 0; j < win.size(); ++j) {
        int pi = *pairwise.index(win[i]), pj = *pairwise.index(win[j]);
        CHECK(win.leq(i, j) == pairwise.leq(pi, pj));
      }
  }
}

TEST_CASE("order axioms and translation invariance") {
  auto g = geometry("A2");
  Window win = Window::around(g, g.fundamental(), 2);
  REQUIRE(win.size() <= 200);
  const int n = win.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i != j) CHECK_FALSE((win.leq(i, j) && win.leq(j, i)));
      if (!win.leq(i, j)) continue;
      for (int k = 0; k < n; ++k)
        if (win.leq(j, k)) CHECK(win.leq(i, k));
    }
  std::mt19937 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    Alcove a = random_alcove(g, rng, 2), b = random_alcove(g, rng, 2);
    IVec shift{static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 7) - 3};
    CHECK(g.compare(a, b) == g.compare(g.translate(a, shift), g.translate(b, shift)));
  }
}

TEST_CASE("intervals, dominance and strings") {
  for (const char* label : {"A2", "B2"}) {
    auto g = geometry(label);
    Window win = Window::around(g, g.fundamental(), 1);
    for (const auto& a : win.alcoves())
      for (Wall s = 0; s < g.num_walls(); ++s) {
        Alcove as = g.right_act(a, s);
        CHECK(g.compare(a, as) != Order::incomparable);
        if (g.is_s_dominant(a, s)) {
          CHECK(g.interval(as, a).size() == 2);
          for (const auto& b : win.alcoves()) {
            if (g.leq(b, a)) CHECK(g.leq(g.right_act(b, s), a));
            if (g.leq(as, b)) CHECK(g.leq(as, g.right_act(b, s)));
          }
        }
      }
    for (const auto& a : win.alcoves())
      for (int r = 0; r < g.roots().num_positive(); ++r) {
        auto str = g.alpha_string(a, r, 3);
        for (std::size_t i = 0; i + 1 < str.size(); ++i) CHECK(g.less(str[i], str[i + 1]));
      }
  }
}

TEST_CASE("orbit support on special sections") {
  auto g = geometry("A2");
  Window win = Window::around(g, g.fundamental(), 2);
  for (Weight lambda : {Weight{0, 0}, Weight{1, 1}}) {
    auto k = g.special_section(lambda);
    for (const auto& a : win.alcoves()) {
      std::set<int> le, lt;
      for (const auto& b : k) {
        if (g.leq(b, a)) le.insert(g.orbit(b));
        if (g.less(b, a)) lt.insert(g.orbit(b));
      }
      if (le.empty()) continue;
      lt.insert(g.orbit(a));
      CHECK(le == lt);
    }
  }
}

TEST_CASE("ideals of small windows") {
  auto g = geometry("A1");
  Window w = Window::of(g, g.special_section({0}));
  CHECK(w.ideals().size() == 3);
  auto a2 = geometry("A2");
  Window k = Window::of(a2, a2.special_section({0, 0}));
  for (const auto& j : k.ideals()) CHECK(k.is_down_closed(j));
  CHECK(k.dump_json().find("covers") != std::string::npos);
}
