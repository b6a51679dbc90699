#include "alcsheaf/wallcross.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace alcsheaf {

namespace {

template <class K>
const std::vector<Poly<K>>& cached_delta(const AlcoveGeometry& g, Wall s) {
  static thread_local std::map<std::tuple<std::string, int, Wall>, std::vector<Poly<K>>> cache;
  auto key = std::make_tuple(g.roots().label(), K::characteristic(), s);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, global_delta<K>(g, s)).first;
  return it->second;
}

template <class K>
Element<K> doubled(const Element<K>& x) {
  Element<K> r{x.degree - 1, x.coords};
  r.coords.insert(r.coords.end(), x.coords.begin(), x.coords.end());
  return r;
}

template <class K>
std::vector<Alcove> doubled_labels(const AlcoveGeometry& g, const std::vector<Alcove>& labels, Wall s) {
  std::vector<Alcove> out = labels;
  for (const auto& a : labels) out.push_back(g.right_act(a, s));
  return out;
}

// Images (u_x, v_x) of an element of M, in the doubled coordinates.
template <class K>
std::pair<Element<K>, Element<K>> epsilon_pair(const AlcoveGeometry& g, const std::vector<Alcove>& labels2,
                                               const Element<K>& x, Wall s) {
  Element<K> u = doubled(x);
  Element<K> v = act(g, cached_delta<K>(g, s), 2, labels2, u);
  return {std::move(u), std::move(v)};
}

}  // namespace

template <class K>
SectionModule<K> epsilon(const AlcoveGeometry& g, const SectionModule<K>& m, Wall s) {
  if (K::characteristic() == 2) throw std::invalid_argument("characteristic 2 is not supported");
  auto basis = m.module.free_basis();
  if (!basis) throw std::invalid_argument("epsilon needs a graded free module");
  std::vector<Alcove> labels = doubled_labels<K>(g, m.labels, s);
  std::vector<int> amb = m.module.ambient();
  for (auto& d : amb) d -= 1;
  std::vector<int> amb2 = amb;
  amb.insert(amb.end(), amb2.begin(), amb2.end());
  std::vector<Element<K>> us, vs;
  for (const auto& b : m.module.generators()) {
    auto [u, v] = epsilon_pair(g, labels, b, s);
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
  }
  us.insert(us.end(), vs.begin(), vs.end());
  SectionModule<K> out{labels, Submodule<K>(m.module.nvars(), amb, std::move(us)), std::nullopt};
  const RankSeries base = m.module.rank_series();
  const RankSeries expect = base * (RankSeries::monomial(1) + RankSeries::monomial(-1));
  auto fb = out.module.free_basis();
  if (!fb || fb->size() != out.module.generators().size() || out.module.rank_series() != expect)
    throw std::runtime_error("epsilon: rank certification failed");
  out.certified_rank = expect;
  return out;
}

template <class K>
Sheaf<K> theta(const AlcoveGeometry& g, const Sheaf<K>& m, Wall s) {
  if (m.is_zero()) return zero_sheaf<K>(g);
  return Sheaf<K>{epsilon(g, m.global, s)};
}

template <class K>
Morphism<K> theta(const AlcoveGeometry& g, const Sheaf<K>& n, const Morphism<K>& f, Wall s) {
  std::vector<Alcove> labels = doubled_labels<K>(g, n.labels(), s);
  Morphism<K> out{f.degree, {}};
  std::vector<Element<K>> vs;
  for (const auto& y : f.images) {
    auto [u, v] = epsilon_pair(g, labels, y, s);
    out.images.push_back(std::move(u));
    vs.push_back(std::move(v));
  }
  out.images.insert(out.images.end(), vs.begin(), vs.end());
  return out;
}

template <class K>
SectionModule<K> theta_sections_factored(const AlcoveGeometry& g, const Sheaf<K>& m, Wall s, const AlcoveSet& j) {
  AlcoveSet sharp = [&g, j, s](const Alcove& c) { return j(c) || j(g.right_act(c, s)); };
  AlcoveSet flat = [&g, j, s](const Alcove& c) { return j(c) && j(g.right_act(c, s)); };
  SectionModule<K> ms = sections(g, m, sharp), mf = sections(g, m, flat);
  if (ms.module.is_zero()) return SectionModule<K>{{}, Submodule<K>(g.rank(), {}), RankSeries()};
  SectionModule<K> es = epsilon(g, ms, s);
  SectionModule<K> ef;
  if (mf.module.is_zero()) {
    ef = SectionModule<K>{{}, Submodule<K>(g.rank(), {}), RankSeries()};
  } else {
    ef = epsilon(g, mf, s);
  }
  // epsilon of the restriction: keep both copies of every label in J-flat.
  std::vector<int> keep;
  const int half = ms.ncoords();
  for (int c = 0; c < half; ++c)
    if (flat(ms.labels[c])) keep.push_back(c);
  const std::size_t first = keep.size();
  for (std::size_t i = 0; i < first; ++i) keep.push_back(keep[i] + half);
  std::vector<Element<K>> images;
  for (const auto& b : es.module.generators()) {
    Element<K> y{b.degree, {}};
    for (int c : keep) y.coords.push_back(b.coords[c]);
    images.push_back(std::move(y));
  }
  OrbitSet dominant, antidominant;
  for (const auto& a : es.labels) (g.is_s_dominant(a, s) ? dominant : antidominant).insert(g.orbit(a));
  for (int w : dominant)
    if (antidominant.count(w)) throw std::logic_error("s-dominance is not constant on an orbit");
  Factorization<K> fac = factor_through(g, es, images, ef, dominant);
  SectionModule<K> out{fac.middle.labels, fac.middle.module.minimal(), std::nullopt};
  if (out.module.free_basis()) out.certified_rank = out.module.rank_series();
  return out;
}

template <class K>
AdjunctionReport check_selfadjoint(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>& n, Wall s,
                                   const std::vector<int>& degrees) {
  AdjunctionReport rep;
  Sheaf<K> tm = theta(g, m, s), tn = theta(g, n, s);
  for (int d : degrees) {
    int left = static_cast<int>(hom_space(g, tm, n, d).size());
    int right = static_cast<int>(hom_space(g, m, tn, d).size());
    rep.dims.push_back({left, right});
    if (left != right) rep.ok = false;
  }
  return rep;
}

WallCrossingPlan wall_crossing_sequence(const AlcoveGeometry& g, const Alcove& target, std::optional<Weight> lambda) {
  WallCrossingPlan plan;
  plan.target = target;
  plan.lambda = lambda ? *lambda : g.box_of(target);
  plan.base = g.special_minus(plan.lambda);
  const IVec goal = g.coords(target);
  IVec cur = g.coords(plan.base);
  for (std::size_t r = 0; r < goal.size(); ++r)
    if (goal[r] > cur[r]) throw std::invalid_argument("target is not below the base alcove");
  Alcove c = plan.base;
  while (c != target) {
    bool moved = false;
    for (Wall s = 0; s < g.num_walls() && !moved; ++s) {
      Alcove d = g.right_act(c, s);
      IVec kd = g.coords(d);
      int changed = -1;
      bool ok = true;
      for (std::size_t r = 0; r < kd.size(); ++r) {
        if (kd[r] == cur[r]) continue;
        if (changed >= 0 || kd[r] != cur[r] - 1 || kd[r] < goal[r]) ok = false;
        changed = static_cast<int>(r);
      }
      if (!ok || changed < 0) continue;
      plan.word.push_back(s);
      c = d;
      cur = kd;
      moved = true;
    }
    if (!moved) throw std::logic_error("no wall to cross toward the target");
  }
  return plan;
}

bool plan_is_valid(const AlcoveGeometry& g, const WallCrossingPlan& plan) {
  if (plan.base != g.special_minus(plan.lambda)) return false;
  Alcove c = plan.base;
  for (Wall s : plan.word) {
    Alcove d = g.right_act(c, s);
    if (!g.less(d, c)) return false;
    c = d;
  }
  return c == plan.target;
}

namespace {

// Dense univariate polynomials, lowest coefficient first.
template <class K>
using UPoly = std::vector<K>;

template <class K>
void trim(UPoly<K>& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

template <class K>
UPoly<K> umul(const UPoly<K>& a, const UPoly<K>& b) {
  if (a.empty() || b.empty()) return {};
  UPoly<K> r(a.size() + b.size() - 1, K(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

template <class K>
UPoly<K> usub(UPoly<K> a, const UPoly<K>& b) {
  if (a.size() < b.size()) a.resize(b.size(), K(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

template <class K>
std::pair<UPoly<K>, UPoly<K>> udivmod(UPoly<K> a, const UPoly<K>& b) {
  trim(a);
  UPoly<K> q;
  if (a.size() < b.size()) return {q, a};
  q.assign(a.size() - b.size() + 1, K(0));
  K inv = b.back().inverse();
  const std::size_t lead = b.size() - 1;
  for (std::size_t k = a.size() - 1; k >= lead; --k) {
    K c = a[k] * inv;
    q[k - lead] = c;
    if (!c.is_zero())
      for (std::size_t i = 0; i < b.size(); ++i) a[k - lead + i] -= c * b[i];
    if (k == lead) break;
  }
  trim(a);
  trim(q);
  return {q, a};
}

// Inverse of a modulo m (a, m coprime).
template <class K>
UPoly<K> uinverse(const UPoly<K>& a, const UPoly<K>& m) {
  UPoly<K> r0 = m, r1 = udivmod(a, m).second, t0, t1{K(1)};
  while (!r1.empty()) {
    auto [q, r] = udivmod(r0, r1);
    UPoly<K> t2 = usub(t0, umul(q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.size() != 1) throw std::logic_error("polynomials are not coprime");
  K inv = r0[0].inverse();
  for (auto& c : t0) c *= inv;
  return udivmod(t0, m).second;
}

template <class K>
K ueval(const UPoly<K>& p, const K& x) {
  K r(0);
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

template <class K>
std::vector<K> candidate_roots(const UPoly<K>& p);

template <>
std::vector<ModP> candidate_roots(const UPoly<ModP>&) {
  std::vector<ModP> out;
  for (long v = 0; v < ModP::characteristic(); ++v) out.push_back(ModP(v));
  return out;
}

template <>
std::vector<Rational> candidate_roots(const UPoly<Rational>& p) {
  // Rational root theorem on the integer multiple of p.
  mpz_class den = 1;
  for (const auto& c : p) den = lcm(den, c.value().get_den());
  std::vector<mpz_class> z;
  for (const auto& c : p) z.push_back(mpz_class(c.value() * den));
  std::size_t lo = 0;
  while (lo < z.size() && z[lo] == 0) ++lo;
  std::vector<Rational> out{Rational(0)};
  if (lo + 1 >= z.size()) return out;
  auto divisors = [](mpz_class n) {
    std::vector<mpz_class> d;
    n = abs(n);
    if (n > 1000000000) return d;
    for (mpz_class i = 1; i * i <= n; ++i)
      if (n % i == 0) {
        d.push_back(i);
        if (i * i != n) d.push_back(n / i);
      }
    return d;
  };
  for (const auto& a : divisors(z[lo]))
    for (const auto& b : divisors(z.back())) {
      out.push_back(Rational(mpq_class(a, b)));
      out.push_back(Rational(mpq_class(-a, b)));
    }
  return out;
}

template <class K>
using Mat = std::vector<std::vector<K>>;

template <class K>
Mat<K> mmul(const Mat<K>& a, const Mat<K>& b) {
  const std::size_t n = a.size();
  Mat<K> r(n, std::vector<K>(n, K(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

template <class K>
Mat<K> identity_mat(std::size_t n) {
  Mat<K> r(n, std::vector<K>(n, K(0)));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = K(1);
  return r;
}

template <class K>
std::vector<K> flat(const Mat<K>& a) {
  std::vector<K> v;
  for (const auto& row : a) v.insert(v.end(), row.begin(), row.end());
  return v;
}

template <class K>
UPoly<K> minimal_polynomial(const Mat<K>& x) {
  const std::size_t n = x.size();
  Echelon<K> ech(static_cast<int>(n * n), true);
  Mat<K> power = identity_mat<K>(n);
  while (ech.insert(flat(power))) power = mmul(power, x);
  UPoly<K> mu = ech.dependencies().front();
  trim(mu);
  K inv = mu.back().inverse();
  for (auto& c : mu) c *= inv;
  return mu;
}

// Polynomial matrices: row i holds the coefficients of the image of basis
// element i in the basis.
template <class K>
using PMat = std::vector<std::vector<Poly<K>>>;

template <class K>
PMat<K> pmul(const PMat<K>& a, const PMat<K>& b) {
  const std::size_t n = a.size();
  PMat<K> r(n, std::vector<Poly<K>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

template <class K>
PMat<K> pcombine(const PMat<K>& a, const K& ca, const PMat<K>& b, const K& cb) {
  PMat<K> r = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) r[i][j] = a[i][j].scaled(ca) + b[i][j].scaled(cb);
  return r;
}

template <class K>
PMat<K> pidentity(std::size_t n) {
  PMat<K> r(n, std::vector<Poly<K>>(n));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = Poly<K>(K(1));
  return r;
}

template <class K>
PMat<K> as_matrix(const AlcoveGeometry& g, const Sheaf<K>& m, const Morphism<K>& f) {
  PMat<K> r;
  for (const auto& y : f.images) {
    auto q = basis_coefficients(m.basis(), m.module().ambient(), g.rank(), y);
    if (!q) throw std::logic_error("endomorphism image outside the global sections");
    r.push_back(*q);
  }
  return r;
}

// Reduction modulo the positive-degree part of S.
template <class K>
Mat<K> reduce(const Sheaf<K>& m, const PMat<K>& p) {
  const std::size_t n = p.size();
  Mat<K> r(n, std::vector<K>(n, K(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m.basis()[i].degree == m.basis()[j].degree) r[i][j] = p[i][j].coefficient(Exponents{0, 0, 0});
  return r;
}

template <class K>
struct EndoAlgebra {
  std::vector<PMat<K>> basis;
  std::vector<Mat<K>> reduced;
};

template <class K>
EndoAlgebra<K> endomorphisms(const AlcoveGeometry& g, const Sheaf<K>& m) {
  EndoAlgebra<K> e;
  for (const auto& f : hom_space(g, m, m, 0)) {
    e.basis.push_back(as_matrix(g, m, f));
    e.reduced.push_back(reduce(m, e.basis.back()));
  }
  return e;
}

// A nontrivial idempotent polynomial in x, if its minimal polynomial has a
// root and is not a power of a single linear factor.
template <class K>
std::optional<UPoly<K>> splitting_polynomial(const Mat<K>& x) {
  UPoly<K> mu = minimal_polynomial(x);
  for (const K& r : candidate_roots<K>(mu)) {
    if (!ueval(mu, r).is_zero()) continue;
    UPoly<K> lin{-r, K(1)}, p1{K(1)}, rest = mu;
    while (true) {
      auto [q, rem] = udivmod(rest, lin);
      if (!rem.empty()) break;
      rest = q;
      p1 = umul(p1, lin);
    }
    if (rest.size() <= 1) return std::nullopt;
    // e = 1 mod p1, e = 0 mod rest.
    UPoly<K> e = umul(rest, uinverse(rest, p1));
    return udivmod(e, mu).second;
  }
  return std::nullopt;
}

template <class K>
std::optional<K> single_eigenvalue(const Mat<K>& x) {
  UPoly<K> mu = minimal_polynomial(x);
  for (const K& r : candidate_roots<K>(mu)) {
    if (!ueval(mu, r).is_zero()) continue;
    UPoly<K> lin{-r, K(1)}, rest = mu;
    while (rest.size() > 1) {
      auto [q, rem] = udivmod(rest, lin);
      if (!rem.empty()) return std::nullopt;
      rest = q;
    }
    return r;
  }
  return std::nullopt;
}

// Whether the subalgebra generated by the given matrices is nilpotent.
template <class K>
bool nilpotent_span(const std::vector<Mat<K>>& gens) {
  if (gens.empty()) return true;
  const std::size_t n = gens[0].size();
  std::vector<Mat<K>> layer;
  {
    Echelon<K> ech(static_cast<int>(n * n));
    for (const auto& x : gens)
      if (ech.insert(flat(x))) layer.push_back(x);
  }
  for (std::size_t step = 0; step <= n && !layer.empty(); ++step) {
    Echelon<K> ech(static_cast<int>(n * n));
    std::vector<Mat<K>> next;
    for (const auto& a : layer)
      for (const auto& b : gens) {
        Mat<K> c = mmul(a, b);
        if (ech.insert(flat(c))) next.push_back(std::move(c));
      }
    layer = std::move(next);
  }
  return layer.empty();
}

template <class K>
Mat<K> combination(const std::vector<Mat<K>>& xs, const std::vector<K>& c) {
  Mat<K> r(xs[0].size(), std::vector<K>(xs[0].size(), K(0)));
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < r.size(); ++j) r[i][j] += c[k] * xs[k][i][j];
  return r;
}

template <class K>
PMat<K> pcombination(const std::vector<PMat<K>>& xs, const std::vector<K>& c) {
  PMat<K> r(xs[0].size(), std::vector<Poly<K>>(xs[0].size()));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (c[k].is_zero()) continue;
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < r.size(); ++j) r[i][j] += xs[k][i][j].scaled(c[k]);
  }
  return r;
}

// Coefficient choices: the basis vectors, then small random combinations.
template <class K>
std::vector<std::vector<K>> probes(std::size_t d) {
  std::vector<std::vector<K>> out;
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<K> c(d, K(0));
    c[k] = K(1);
    out.push_back(std::move(c));
  }
  std::mt19937 rng(1729);
  for (int t = 0; t < 8; ++t) {
    std::vector<K> c(d);
    for (auto& x : c) x = K(static_cast<long>(rng() % 7) - 3);
    out.push_back(std::move(c));
  }
  return out;
}

enum class Locality { local, split, undecided };

template <class K>
struct Split {
  Locality kind = Locality::undecided;
  PMat<K> idempotent;
};

template <class K>
Split<K> find_split(const EndoAlgebra<K>& e) {
  Split<K> out;
  const std::size_t d = e.basis.size();
  if (d == 0) return out;
  bool all_single = true;
  std::vector<Mat<K>> nil;
  for (std::size_t k = 0; k < d; ++k) {
    auto c = single_eigenvalue(e.reduced[k]);
    if (!c) {
      all_single = false;
      break;
    }
    Mat<K> y = e.reduced[k];
    for (std::size_t i = 0; i < y.size(); ++i) y[i][i] -= *c;
    nil.push_back(std::move(y));
  }
  if (all_single && nilpotent_span(nil)) {
    out.kind = Locality::local;
    return out;
  }
  for (const auto& c : probes<K>(d)) {
    Mat<K> x = combination(e.reduced, c);
    auto poly = splitting_polynomial(x);
    if (!poly) continue;
    PMat<K> lifted = pcombination(e.basis, c);
    const std::size_t n = lifted.size();
    PMat<K> idem(n, std::vector<Poly<K>>(n));
    for (std::size_t i = poly->size(); i-- > 0;) {
      idem = pmul(idem, lifted);
      for (std::size_t j = 0; j < n; ++j) idem[j][j] += Poly<K>((*poly)[i]);
    }
    for (int it = 0; it < 64; ++it) {
      PMat<K> sq = pmul(idem, idem);
      if (sq == idem) break;
      PMat<K> cube = pmul(sq, idem);
      idem = pcombine(sq, K(3), cube, K(-2));
    }
    if (pmul(idem, idem) != idem) throw std::logic_error("idempotent lifting did not converge");
    out.kind = Locality::split;
    out.idempotent = std::move(idem);
    return out;
  }
  return out;
}

template <class K>
Sheaf<K> image_of(const AlcoveGeometry& g, const Sheaf<K>& m, const PMat<K>& p) {
  std::vector<Element<K>> gens;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Element<K> e{m.basis()[i].degree, std::vector<Poly<K>>(m.ncoords())};
    for (std::size_t k = 0; k < p.size(); ++k)
      if (!p[i][k].is_zero()) {
        Element<K> t = m.basis()[k].scaled(p[i][k]);
        for (int c = 0; c < m.ncoords(); ++c) e.coords[c] += t.coords[c];
      }
    gens.push_back(std::move(e));
  }
  return make_sheaf<K>(g, m.labels(), m.module().ambient(), std::move(gens));
}

template <class K>
std::string describe(const AlcoveGeometry& g, const Sheaf<K>& m) {
  std::ostringstream os;
  os << "rank " << (m.global.certified_rank ? m.global.certified_rank->str() : "?") << " on "
     << m.support().size() << " alcoves";
  (void)g;
  return os.str();
}

}  // namespace

template <class K>
bool has_local_endomorphisms(const AlcoveGeometry& g, const Sheaf<K>& m) {
  if (m.is_zero()) return false;
  return find_split(endomorphisms(g, m)).kind == Locality::local;
}

template <class K>
std::vector<Sheaf<K>> decompose(const AlcoveGeometry& g, const Sheaf<K>& m, std::vector<std::string>* trace) {
  std::vector<Sheaf<K>> done, work{m};
  while (!work.empty()) {
    Sheaf<K> x = std::move(work.back());
    work.pop_back();
    if (x.is_zero()) continue;
    EndoAlgebra<K> e = endomorphisms(g, x);
    Split<K> sp = find_split(e);
    if (sp.kind == Locality::local) {
      if (trace) trace->push_back("indecomposable: " + describe(g, x) + ", dim End_0 = " + std::to_string(e.basis.size()));
      done.push_back(std::move(x));
      continue;
    }
    if (sp.kind == Locality::undecided)
      throw std::runtime_error("field obstruction: no idempotent splits over the field for " + describe(g, x));
    const std::size_t n = sp.idempotent.size();
    PMat<K> other = pcombine(pidentity<K>(n), K(1), sp.idempotent, K(-1));
    Sheaf<K> a = image_of(g, x, sp.idempotent), b = image_of(g, x, other);
    if (trace)
      trace->push_back("split " + describe(g, x) + " into " + describe(g, a) + " and " + describe(g, b));
    work.push_back(std::move(a));
    work.push_back(std::move(b));
  }
  return done;
}

namespace {

int covering_radius(const AlcoveGeometry& g, const Alcove& center, const std::vector<Alcove>& alcoves) {
  IVec c = g.bary(center);
  long r = 0;
  for (const auto& a : alcoves) {
    IVec b = g.bary(a);
    for (std::size_t i = 0; i < b.size(); ++i) r = std::max(r, (std::abs(b[i] - c[i]) + g.scale() - 1) / g.scale());
  }
  return static_cast<int>(r);
}

}  // namespace

template <class K>
Projective<K> build_projective(const AlcoveGeometry& g, const Alcove& a, const ProjectiveOptions& options) {
  ProjectiveReport rep;
  rep.alcove = a;
  rep.plan = wall_crossing_sequence(g, a, options.lambda);
  if (!plan_is_valid(g, rep.plan)) throw std::logic_error("invalid wall crossing plan");
  const Weight& lambda = rep.plan.lambda;
  rep.shift = g.length(lambda, a);

  Sheaf<K> q = shifted(section_sheaf<K>(g, lambda), static_cast<int>(g.length(lambda, rep.plan.base)));
  for (Wall s : rep.plan.word) {
    q = theta(g, q, s);
    if (options.trace) rep.steps.push_back({s, verma_ranks(g, q)});
  }

  Sheaf<K> target = shifted(standard_sheaf<K>(g, a), static_cast<int>(rep.shift));
  std::optional<Sheaf<K>> chosen;
  for (auto& piece : decompose(g, q, &rep.decomposition)) {
    auto maps = hom_space(g, piece, target, 0);
    bool epi = false;
    for (const auto& f : maps)
      for (const auto& y : f.images)
        if (!y.coords[0].is_zero() && y.degree == target.module().ambient()[0]) epi = true;
    if (epi && !chosen) {
      rep.hom_to_standard = static_cast<int>(maps.size());
      rep.epi = true;
      chosen = std::move(piece);
    }
  }
  if (!chosen) throw std::logic_error("no summand maps onto the shifted standard object");
  rep.table = verma_ranks(g, *chosen);
  rep.normalized = shifted(rep.table, static_cast<int>(rep.shift));
  EndoAlgebra<K> endo = endomorphisms(g, *chosen);
  rep.endomorphism_dim = static_cast<int>(endo.basis.size());
  rep.local = find_split(endo).kind == Locality::local;
  rep.window_radius = covering_radius(g, rep.plan.base, chosen->support());
  return Projective<K>{std::move(*chosen), std::move(rep)};
}

std::string to_json(const AlcoveGeometry& g, const ProjectiveReport& r) {
  using nlohmann::ordered_json;
  auto table = [&](const VermaTable& t) {
    ordered_json o = ordered_json::object();
    for (const auto& [a, s] : t) o[g.format(a)] = s.str();
    return o;
  };
  ordered_json out;
  out["alcove"] = g.format(r.alcove);
  out["lambda"] = r.plan.lambda;
  out["base"] = g.format(r.plan.base);
  out["word"] = r.plan.word;
  out["shift"] = r.shift;
  out["table"] = table(r.table);
  out["normalized"] = table(r.normalized);
  out["endomorphism_dim"] = r.endomorphism_dim;
  out["local"] = r.local;
  out["hom_to_standard"] = r.hom_to_standard;
  out["epi"] = r.epi;
  out["window_radius"] = r.window_radius;
  out["decomposition"] = r.decomposition;
  if (!r.steps.empty()) {
    ordered_json steps = ordered_json::array();
    for (const auto& [s, t] : r.steps) steps.push_back({{"wall", s}, {"table", table(t)}});
    out["trace"] = steps;
  }
  return out.dump(2);
}

template <class K>
std::optional<Morphism<K>> lift(const AlcoveGeometry& g, const Sheaf<K>& b, const Sheaf<K>& m, const Sheaf<K>& n,
                                const Morphism<K>& p, const Morphism<K>& h) {
  std::vector<K> goal = flatten(b, n, h);
  auto homs = hom_space(g, b, m, h.degree - p.degree);
  if (std::all_of(goal.begin(), goal.end(), [](const K& x) { return x.is_zero(); }))
    return zero_morphism(b, m, h.degree - p.degree);
  if (homs.empty()) return std::nullopt;
  Echelon<K> ech(static_cast<int>(goal.size()), true);
  for (const auto& f : homs) ech.insert(flatten(b, n, compose(m, n, f, p)));
  std::vector<K> combo(ech.inserted(), K(0));
  if (ech.reduce(goal, &combo) >= 0) return std::nullopt;
  Morphism<K> l = linear_combination(homs, combo);
  Morphism<K> check = compose(m, n, l, p);
  if (flatten(b, n, check) != flatten(b, n, h)) throw std::logic_error("lift does not compose to the given map");
  return l;
}

#define ALCSHEAF_INSTANTIATE(K)                                                                               \
  template SectionModule<K> epsilon(const AlcoveGeometry&, const SectionModule<K>&, Wall);                    \
  template Sheaf<K> theta(const AlcoveGeometry&, const Sheaf<K>&, Wall);                                      \
  template Morphism<K> theta(const AlcoveGeometry&, const Sheaf<K>&, const Morphism<K>&, Wall);               \
  template SectionModule<K> theta_sections_factored(const AlcoveGeometry&, const Sheaf<K>&, Wall,             \
                                                    const AlcoveSet&);                                        \
  template AdjunctionReport check_selfadjoint(const AlcoveGeometry&, const Sheaf<K>&, const Sheaf<K>&, Wall,  \
                                              const std::vector<int>&);                                       \
  template Projective<K> build_projective(const AlcoveGeometry&, const Alcove&, const ProjectiveOptions&);    \
  template std::vector<Sheaf<K>> decompose(const AlcoveGeometry&, const Sheaf<K>&, std::vector<std::string>*); \
  template bool has_local_endomorphisms(const AlcoveGeometry&, const Sheaf<K>&);                              \
  template std::optional<Morphism<K>> lift(const AlcoveGeometry&, const Sheaf<K>&, const Sheaf<K>&,           \
                                           const Sheaf<K>&, const Morphism<K>&, const Morphism<K>&);

ALCSHEAF_INSTANTIATE(Rational)
ALCSHEAF_INSTANTIATE(ModP)

}  // namespace alcsheaf
