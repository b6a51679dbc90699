#include "suites.hpp"

#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "alcsheaf/wallcross.hpp"
#include "json.hpp"

namespace alcsheaf::cli {

namespace {

RankSeries rank_at(const VermaTable& t, const Alcove& a) {
  auto it = t.find(a);
  return it == t.end() ? RankSeries() : it->second;
}

std::vector<std::vector<Alcove>> ideals_of(const Window& w) {
  std::vector<std::vector<Alcove>> out;
  for (const auto& ideal : w.ideals()) {
    std::vector<Alcove> in;
    for (int i = 0; i < w.size(); ++i)
      if (ideal[i]) in.push_back(w[i]);
    out.push_back(std::move(in));
  }
  return out;
}

std::vector<Alcove> with_translates(const AlcoveGeometry& g, const std::vector<Alcove>& xs, Wall s) {
  std::set<Alcove> all(xs.begin(), xs.end());
  for (const auto& a : xs) all.insert(g.right_act(a, s));
  return {all.begin(), all.end()};
}

void gkm(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  r.expect(gkm_check(g.roots(), c.characteristic),
           "GKM condition fails in characteristic " + std::to_string(c.characteristic));
}

void order(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  Window w = Window::around(g, g.special_minus(c.lambda), c.window);
  const auto& all = w.alcoves();
  IVec shift(g.rank(), 0);
  shift[0] = 1;
  for (const auto& a : all)
    for (const auto& b : all) {
      bool ab = g.leq(a, b), ba = g.leq(b, a);
      r.expect(!(ab && ba) || a == b, "antisymmetry at " + g.format(a));
      r.expect(ab == g.leq(g.translate(a, shift), g.translate(b, shift)), "translation invariance at " + g.format(a));
      if (!ab) continue;
      for (const auto& x : all)
        if (g.leq(b, x)) r.expect(g.leq(a, x), "transitivity at " + g.format(a));
    }
}

void intervals(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  Window w = Window::around(g, g.special_minus(c.lambda), c.window);
  const auto& all = w.alcoves();
  for (Wall s = 0; s < g.num_walls(); ++s) {
    for (const auto& a : all) {
      Alcove as = g.right_act(a, s);
      bool up = g.leq(a, as);
      r.expect(up || g.leq(as, a), "incomparable pair at " + g.format(a));
      r.expect(g.interval(up ? a : as, up ? as : a).size() == 2, "not an interval at " + g.format(a));
    }
    for (const auto& top : all) {
      auto in_j = [&](const Alcove& x) { return g.leq(x, top); };
      for (const auto& x : all)
        for (const auto& b : all) {
          if (!g.leq(b, x)) continue;
          Alcove xs = g.right_act(x, s), bs = g.right_act(b, s);
          if (in_j(x) && in_j(xs)) r.expect(in_j(b) && in_j(bs), "flat part not open below " + g.format(top));
          if (in_j(x) || in_j(xs)) r.expect(in_j(b) || in_j(bs), "sharp part not open below " + g.format(top));
        }
    }
    for (const auto& a : all)
      for (int root = 0; root < g.roots().num_positive(); ++root) {
        auto str = g.alpha_string(a, root, 2);
        auto both = with_translates(g, str, s);
        bool total = true;
        for (const auto& x : both)
          for (const auto& y : both) total = total && g.compare(x, y) != Order::incomparable;
        if (total) continue;
        for (const auto& x : str)
          r.expect(g.is_s_dominant(x, s) == g.is_s_dominant(str.front(), s), "mixed string at " + g.format(x));
      }
  }
}

template <class K>
void flabbiness(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  FlabbyReport rep = verify_section_flabby<K>(g, c.lambda, section_sheaf<K>(g, c.lambda, false));
  r.expect(rep.ok, rep.witness.empty() ? "restriction not surjective" : rep.witness);
  r.checks += rep.ideals_checked;
}

template <class K>
void section_subquotients(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  VermaTable t = verma_ranks(g, section_sheaf<K>(g, c.lambda));
  const auto& rs = g.roots();
  r.expect(t.size() == static_cast<std::size_t>(rs.order()), "support size");
  for (int x = 0; x < rs.order(); ++x)
    r.expect(rank_at(t, g.tau(c.lambda, x)) == RankSeries::monomial(2 * rs.length(x)),
             "entry at " + g.format(g.tau(c.lambda, x)));
}

template <class K>
std::vector<std::pair<std::string, Sheaf<K>>> objects(const AlcoveGeometry& g, const SuiteConfig& c) {
  auto k = section_sheaf<K>(g, c.lambda);
  return {{"V", standard_sheaf<K>(g, g.special_minus(c.lambda))}, {"K", k}, {"theta_1 K", theta(g, k, 1)}};
}

template <class K>
void epsilon_suite(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  const RankSeries vv = RankSeries::monomial(1) + RankSeries::monomial(-1);
  for (const auto& [name, m] : objects<K>(g, c))
    for (Wall s = 0; s < g.num_walls(); ++s)
      for (const auto& j : ideals_of(Window::of(g, with_translates(g, m.support(), s)))) {
        std::set<Alcove> in(j.begin(), j.end());
        bool invariant = std::all_of(j.begin(), j.end(), [&](const Alcove& a) { return in.count(g.right_act(a, s)); });
        if (!invariant) continue;
        auto sec = sections(g, m, member_of(j));
        if (sec.module.is_zero()) continue;
        auto e = epsilon(g, sec, s);
        r.expect(e.module.rank_series() == vv * sec.module.rank_series(), name + " on wall " + std::to_string(s));
      }
}

template <class K>
void theta_subquotient(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  for (const auto& [name, m] : objects<K>(g, c)) {
    VermaTable before = verma_ranks(g, m);
    for (Wall s = 0; s < g.num_walls(); ++s) {
      VermaTable after = verma_ranks(g, theta(g, m, s));
      std::set<Alcove> span;
      for (const auto& [a, x] : before) span.insert({a, g.right_act(a, s)});
      for (const auto& a : span) {
        Alcove as = g.right_act(a, s);
        if (!g.less(a, as)) continue;
        RankSeries sum = rank_at(before, a) + rank_at(before, as);
        r.expect(rank_at(after, a) == sum.shifted(-1) && rank_at(after, as) == sum.shifted(1),
                 name + " at " + g.format(a) + " wall " + std::to_string(s));
      }
      for (const auto& [a, x] : after) r.expect(span.count(a) > 0, name + " unexpected support at " + g.format(a));
    }
  }
}

template <class K>
void exactness(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  auto k = section_sheaf<K>(g, c.lambda);
  for (const auto& in : ideals_of(Window::of(g, k.support()))) {
    AlcoveSet j = member_of(in);
    auto open = open_part(g, k, j), closed = closed_part(g, k, j);
    auto inc = inclusion_morphism(g, closed, k, j);
    auto res = restriction_morphism(g, k, j);
    r.expect(check_exact(g, closed, inc, k, res, open).exact, "canonical sequence");
    for (Wall s = 0; s < g.num_walls(); ++s) {
      auto tc = theta(g, closed, s), tk = theta(g, k, s), to = theta(g, open, s);
      auto rep = check_exact(g, tc, theta(g, k, inc, s), tk, theta(g, open, res, s), to);
      r.expect(rep.exact, "wall " + std::to_string(s) + ": " + rep.witness);
      verma_ranks(g, tk);
    }
  }
}

template <class K>
void selfadjoint(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  auto k = section_sheaf<K>(g, c.lambda);
  auto v = standard_sheaf<K>(g, g.special_minus(c.lambda));
  std::vector<std::pair<Sheaf<K>, Sheaf<K>>> pairs{{v, v}, {k, v}, {v, k}, {zero_sheaf<K>(g), v}};
  for (const auto& [m, n] : pairs)
    for (Wall s = 0; s < g.num_walls(); ++s)
      r.expect(check_selfadjoint(g, m, n, s, {-2, -1, 0, 1, 2}).ok, "wall " + std::to_string(s));
}

template <class K>
void category(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  auto k = section_sheaf<K>(g, c.lambda);
  r.expect(certify_category_C(g, k).all(), "section sheaf");
  for (Wall s = 0; s < g.num_walls(); ++s)
    r.expect(certify_category_C(g, theta(g, k, s)).all(), "wall crossing on wall " + std::to_string(s));
}

template <class K>
void projective(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  for (const auto& a : g.box(c.lambda)) {
    auto p = build_projective<K>(g, a, {c.lambda, false});
    const auto& rep = p.report;
    r.expect(rep.epi, "no epi at " + g.format(a));
    r.expect(rep.local, "End_0 not local at " + g.format(a));
    r.expect(rank_at(rep.normalized, a) == RankSeries::parse("1"), "entry at " + g.format(a));
    for (const auto& [b, x] : rep.normalized) r.expect(g.leq(a, b), "support outside the cone at " + g.format(b));
  }
}

template <class K>
void lifting(const AlcoveGeometry& g, const SuiteConfig& c, SuiteResult& r) {
  auto k = section_sheaf<K>(g, c.lambda);
  std::vector<std::pair<Sheaf<K>, AlcoveSet>> epis;
  for (const auto& in : ideals_of(Window::of(g, k.support()))) epis.push_back({k, member_of(in)});
  for (const auto& a : g.box(c.lambda)) {
    auto b = build_projective<K>(g, a, {c.lambda, false}).sheaf;
    for (const auto& [m, j] : epis) {
      auto n = open_part(g, m, j);
      auto p = restriction_morphism(g, m, j);
      for (int d = -2; d <= 2; ++d)
        for (const auto& h : hom_space(g, b, n, d))
          r.expect(lift(g, b, m, n, p, h).has_value(), "no lift in degree " + std::to_string(d));
    }
  }
}

using Runner = std::function<void(const AlcoveGeometry&, const SuiteConfig&, SuiteResult&)>;

template <class K>
std::map<std::string, Runner> field_suites() {
  return {
      {"flabbiness", flabbiness<K>},
      {"section-subquotients", section_subquotients<K>},
      {"epsilon", epsilon_suite<K>},
      {"theta-subquotient", theta_subquotient<K>},
      {"exactness", exactness<K>},
      {"selfadjoint", selfadjoint<K>},
      {"category", category<K>},
      {"projective", projective<K>},
      {"lifting", lifting<K>},
  };
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gkm",        "order",      "intervals",   "flabbiness",
                                              "section-subquotients", "epsilon", "theta-subquotient",
                                              "exactness",  "selfadjoint", "category",   "projective",
                                              "lifting"};
  return names;
}

std::vector<SuiteResult> run_suite(const AlcoveGeometry& g, const std::string& name, const SuiteConfig& config) {
  if (name == "all") {
    std::vector<SuiteResult> out;
    for (const auto& n : suite_names()) {
      auto part = run_suite(g, n, config);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw std::invalid_argument("unknown suite '" + name + "'");
  SuiteResult r;
  r.name = name;
  try {
    if (name == "gkm") {
      gkm(g, config, r);
    } else if (name == "order") {
      order(g, config, r);
    } else if (name == "intervals") {
      intervals(g, config, r);
    } else if (!gkm_check(g.roots(), config.characteristic)) {
      r.expect(false, "GKM condition fails in characteristic " + std::to_string(config.characteristic));
    } else {
      with_field(config.characteristic, [&]<class K>() { field_suites<K>().at(name)(g, config, r); });
    }
  } catch (const std::exception& e) {
    r.expect(false, std::string("error: ") + e.what());
  }
  return {r};
}

std::string to_json(const AlcoveGeometry& g, const SuiteConfig& config, const std::vector<SuiteResult>& results) {
  nlohmann::ordered_json j;
  j["schema"] = "alcsheaf.verify/1";
  j["type"] = g.roots().label();
  j["char"] = config.characteristic;
  j["weight"] = config.lambda;
  bool pass = true;
  auto& list = j["suites"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    pass = pass && r.pass;
    list.push_back({{"suite", r.name}, {"pass", r.pass}, {"checks", r.checks}, {"failures", r.failures}});
  }
  j["pass"] = pass;
  return j.dump(2);
}

}  // namespace alcsheaf::cli
