#include "alcsheaf/sheaves.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace alcsheaf {

template <class K>
std::vector<Alcove> Sheaf<K>::support() const {
  std::set<Alcove> s(global.labels.begin(), global.labels.end());
  return {s.begin(), s.end()};
}

AlcoveSet down_set(const AlcoveGeometry& g, const Alcove& a) {
  return [&g, a](const Alcove& c) { return g.leq(c, a); };
}

AlcoveSet strict_down_set(const AlcoveGeometry& g, const Alcove& a) {
  return [&g, a](const Alcove& c) { return c != a && g.leq(c, a); };
}

AlcoveSet member_of(std::vector<Alcove> alcoves) {
  std::set<Alcove> s(alcoves.begin(), alcoves.end());
  return [s = std::move(s)](const Alcove& c) { return s.count(c) > 0; };
}

namespace {

AlcoveSet everything() {
  return [](const Alcove&) { return true; };
}

AlcoveSet complement(AlcoveSet j) {
  return [j = std::move(j)](const Alcove& c) { return !j(c); };
}

AlcoveSet both(AlcoveSet a, AlcoveSet b) {
  return [a = std::move(a), b = std::move(b)](const Alcove& c) { return a(c) && b(c); };
}

template <class K>
std::vector<int> coordinates_in(const std::vector<Alcove>& labels, const AlcoveSet& j) {
  std::vector<int> keep;
  for (std::size_t c = 0; c < labels.size(); ++c)
    if (j(labels[c])) keep.push_back(static_cast<int>(c));
  return keep;
}

template <class K>
SectionModule<K> certified(std::vector<Alcove> labels, Submodule<K> module) {
  SectionModule<K> out{std::move(labels), module.minimal(), std::nullopt};
  if (auto basis = out.module.free_basis()) {
    out.module = Submodule<K>(out.module.nvars(), out.module.ambient(), *basis);
    out.certified_rank = out.module.rank_series();
  }
  return out;
}

template <class K>
Element<K> zero_element(int degree, std::size_t ncoords) {
  return Element<K>{degree, std::vector<Poly<K>>(ncoords)};
}

template <class K>
Element<K> restrict_element(const Element<K>& x, const std::vector<int>& keep) {
  Element<K> r{x.degree, {}};
  for (int c : keep) r.coords.push_back(x.coords[c]);
  return r;
}

// Elements of M^J vanishing outside K, in the coordinates of J.
template <class K>
SectionModule<K> supported_in_j(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j,
                                const AlcoveSet& k) {
  SectionModule<K> whole = sections(g, m, j);
  std::vector<bool> allowed(whole.ncoords());
  for (int c = 0; c < whole.ncoords(); ++c) allowed[c] = k(whole.labels[c]);
  SectionModule<K> rest = sections(g, m, both(j, complement(k)));
  SectionModule<K> out{whole.labels, Submodule<K>(whole.module.nvars(), whole.module.ambient()), std::nullopt};
  if (whole.module.is_zero()) {
    out.certified_rank = RankSeries();
    return out;
  }
  const int top = whole.module.max_generator_degree();
  const int base = default_cap(g, top);
  for (int cap : {top + 2, base, 2 * base, 4 * base}) {
    out.module = whole.module.restrict_to(allowed, cap).minimal();
    if (!whole.certified_rank || !rest.certified_rank) continue;
    auto basis = out.module.free_basis();
    if (!basis) continue;
    RankSeries part = out.module.rank_series();
    if (part + *rest.certified_rank == *whole.certified_rank) {
      out.module = Submodule<K>(out.module.nvars(), out.module.ambient(), *basis);
      out.certified_rank = part;
      return out;
    }
  }
  return out;
}

}  // namespace

template <class K>
Sheaf<K> make_sheaf(const AlcoveGeometry& g, std::vector<Alcove> labels, std::vector<int> ambient,
                    std::vector<Element<K>> generators) {
  if (labels.size() != ambient.size()) throw std::invalid_argument("one ambient degree per label expected");
  Submodule<K> m(g.rank(), std::move(ambient), std::move(generators));
  SectionModule<K> s = certified<K>(std::move(labels), std::move(m));
  if (!s.certified_rank) throw std::runtime_error("global sections are not graded free");
  return Sheaf<K>{std::move(s)};
}

template <class K>
Sheaf<K> zero_sheaf(const AlcoveGeometry& g) {
  return Sheaf<K>{SectionModule<K>{{}, Submodule<K>(g.rank(), {}), RankSeries()}};
}

template <class K>
Sheaf<K> standard_sheaf(const AlcoveGeometry& g, const Alcove& a) {
  Element<K> one{0, {Poly<K>(K(1))}};
  return make_sheaf<K>(g, {a}, {0}, {one});
}

template <class K>
FlabbyReport verify_section_flabby(const AlcoveGeometry& g, const Weight& lambda, const Sheaf<K>& m) {
  FlabbyReport rep;
  std::vector<Alcove> sect = g.special_section(lambda);
  Window w = Window::of(g, sect);
  for (const auto& ideal : w.ideals()) {
    std::vector<Alcove> inside;
    for (int i = 0; i < w.size(); ++i)
      if (ideal[i]) inside.push_back(w[i]);
    if (inside.empty()) continue;
    ++rep.ideals_checked;
    AlcoveSet j = member_of(inside);
    SectionModule<K> restricted = sections(g, m, j);
    SectionModule<K> local = structure_algebra<K>(g, restricted.labels);
    bool ok = restricted.certified_rank && local.certified_rank &&
              *restricted.certified_rank == *local.certified_rank;
    for (const auto& z : local.module.generators())
      if (ok && !restricted.module.contains(z)) ok = false;
    for (const auto& x : restricted.module.generators())
      if (ok && !local.module.contains(x)) ok = false;
    if (!ok) {
      rep.ok = false;
      std::ostringstream os;
      os << "restriction not surjective onto the ideal {";
      for (std::size_t i = 0; i < inside.size(); ++i) os << (i ? ", " : "") << g.format(inside[i]);
      os << "}";
      rep.witness = os.str();
      return rep;
    }
  }
  return rep;
}

template <class K>
Sheaf<K> section_sheaf(const AlcoveGeometry& g, const Weight& lambda, bool verify, FlabbyReport* report) {
  std::vector<Alcove> labels;
  for (int x = 0; x < g.roots().order(); ++x) labels.push_back(g.tau(lambda, x));
  Sheaf<K> m{structure_algebra<K>(g, labels)};
  if (verify) {
    FlabbyReport rep = verify_section_flabby(g, lambda, m);
    if (report) *report = rep;
    if (!rep.ok) throw std::runtime_error("flabbiness certification failed: " + rep.witness);
  }
  return m;
}

template <class K>
Sheaf<K> shifted(const Sheaf<K>& m, int l) {
  SectionModule<K> s{m.labels(), m.module().shifted(l), std::nullopt};
  if (m.global.certified_rank) s.certified_rank = m.global.certified_rank->shifted(-l);
  return Sheaf<K>{std::move(s)};
}

template <class K>
Sheaf<K> direct_sum(const Sheaf<K>& a, const Sheaf<K>& b) {
  std::vector<Alcove> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  std::vector<int> amb = a.module().ambient();
  amb.insert(amb.end(), b.module().ambient().begin(), b.module().ambient().end());
  std::vector<Element<K>> gens;
  for (const auto& x : a.basis()) {
    Element<K> e = x;
    e.coords.resize(labels.size());
    gens.push_back(std::move(e));
  }
  for (const auto& x : b.basis()) {
    Element<K> e{x.degree, std::vector<Poly<K>>(a.ncoords())};
    e.coords.insert(e.coords.end(), x.coords.begin(), x.coords.end());
    gens.push_back(std::move(e));
  }
  std::optional<RankSeries> r;
  if (a.global.certified_rank && b.global.certified_rank) r = *a.global.certified_rank + *b.global.certified_rank;
  Submodule<K> mod(a.module().nvars(), std::move(amb), std::move(gens));
  return Sheaf<K>{SectionModule<K>{std::move(labels), std::move(mod), r}};
}

template <class K>
SectionModule<K> sections(const AlcoveGeometry&, const Sheaf<K>& m, const AlcoveSet& j) {
  std::vector<int> keep = coordinates_in<K>(m.labels(), j);
  std::vector<Alcove> labels;
  for (int c : keep) labels.push_back(m.labels()[c]);
  return certified<K>(std::move(labels), m.module().project(keep));
}

template <class K>
SectionModule<K> sections_supported(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j,
                                    const AlcoveSet& k) {
  SectionModule<K> full = supported_in_j(g, m, j, k);
  std::vector<int> keep = coordinates_in<K>(full.labels, k);
  std::vector<Alcove> labels;
  for (int c : keep) labels.push_back(full.labels[c]);
  return SectionModule<K>{std::move(labels), full.module.project(keep), full.certified_rank};
}

template <class K>
SectionModule<K> subquotient(const AlcoveGeometry& g, const Sheaf<K>& m, const std::vector<Alcove>& k,
                             SubquotientRoute route) {
  AlcoveSet in_k = member_of(k);
  for (const auto& c : m.support()) {
    if (in_k(c)) continue;
    bool above = false, below = false;
    for (const auto& a : k) {
      above = above || g.leq(a, c);
      below = below || g.leq(c, a);
    }
    if (above && below) throw std::invalid_argument("set is not locally closed: " + g.format(c) + " lies inside it");
  }
  AlcoveSet j;
  if (route == SubquotientRoute::down_closure) {
    j = [&g, k](const Alcove& c) {
      return std::any_of(k.begin(), k.end(), [&](const Alcove& a) { return g.leq(c, a); });
    };
  } else {
    j = [&g, k, in_k](const Alcove& c) {
      return in_k(c) || std::none_of(k.begin(), k.end(), [&](const Alcove& a) { return g.leq(a, c); });
    };
  }
  return sections_supported(g, m, j, in_k);
}

template <class K>
VermaTable verma_ranks(const AlcoveGeometry& g, const Sheaf<K>& m) {
  VermaTable out;
  RankSeries total;
  for (const auto& a : m.support()) {
    SectionModule<K> sub = subquotient(g, m, {a});
    if (!sub.certified_rank)
      throw std::runtime_error("subquotient at " + g.format(a) + " is not certified graded free");
    total += *sub.certified_rank;
    if (!sub.certified_rank->is_zero()) out[a] = *sub.certified_rank;
  }
  if (!m.global.certified_rank || total != *m.global.certified_rank)
    throw std::runtime_error("subquotient ranks do not add up to the global rank");
  return out;
}

std::string verma_json(const AlcoveGeometry& g, const VermaTable& t) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [a, r] : t) out[g.format(a)] = r.str();
  return out.dump(2);
}

std::string verma_csv(const AlcoveGeometry& g, const VermaTable& t) {
  std::ostringstream os;
  os << "alcove,coordinates,rank\n";
  for (const auto& [a, r] : t) os << '"' << g.format(a) << "\",\"" << g.format_coords(a) << "\"," << r.str() << '\n';
  return os.str();
}

VermaTable shifted(const VermaTable& t, int exponent) {
  VermaTable out;
  for (const auto& [a, r] : t) out[a] = r.shifted(exponent);
  return out;
}

template <class K>
Sheaf<K> open_part(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j) {
  SectionModule<K> s = sections(g, m, j);
  if (!s.certified_rank) throw std::runtime_error("sections over the open set are not graded free");
  return Sheaf<K>{std::move(s)};
}

template <class K>
Sheaf<K> closed_part(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j) {
  SectionModule<K> s = sections_supported(g, m, everything(), complement(j));
  if (!s.certified_rank) throw std::runtime_error("sections supported on the closed part are not certified");
  return Sheaf<K>{std::move(s)};
}

template <class K>
Morphism<K> zero_morphism(const Sheaf<K>& m, const Sheaf<K>& n, int degree) {
  Morphism<K> f{degree, {}};
  for (const auto& b : m.basis()) f.images.push_back(zero_element<K>(b.degree + degree, n.ncoords()));
  return f;
}

template <class K>
Morphism<K> identity_morphism(const Sheaf<K>& m) {
  return Morphism<K>{0, m.basis()};
}

template <class K>
Morphism<K> restriction_morphism(const AlcoveGeometry&, const Sheaf<K>& m, const AlcoveSet& j) {
  std::vector<int> keep = coordinates_in<K>(m.labels(), j);
  Morphism<K> f{0, {}};
  for (const auto& b : m.basis()) f.images.push_back(restrict_element(b, keep));
  return f;
}

template <class K>
Morphism<K> inclusion_morphism(const AlcoveGeometry&, const Sheaf<K>& closed, const Sheaf<K>& m,
                               const AlcoveSet& j) {
  std::vector<int> where;
  for (int c = 0; c < m.ncoords(); ++c)
    if (!j(m.labels()[c])) where.push_back(c);
  if (static_cast<int>(where.size()) != closed.ncoords()) throw std::invalid_argument("closed part does not match");
  Morphism<K> f{0, {}};
  for (const auto& b : closed.basis()) {
    Element<K> e = zero_element<K>(b.degree, m.ncoords());
    for (std::size_t i = 0; i < where.size(); ++i) e.coords[where[i]] = b.coords[i];
    f.images.push_back(std::move(e));
  }
  return f;
}

namespace {

// x = sum q_i gens_i for some polynomials q_i; images_i are the values on gens_i.
template <class K>
std::optional<Element<K>> apply_on(const std::vector<Element<K>>& gens, const std::vector<int>& ambient, int nvars,
                                   const std::vector<Element<K>>& images, std::size_t target_ncoords, int degree,
                                   const Element<K>& x) {
  Element<K> out = zero_element<K>(x.degree + degree, target_ncoords);
  if (x.is_zero()) return out;
  auto q = basis_coefficients(gens, ambient, nvars, x);
  if (!q) return std::nullopt;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (!(*q)[i].is_zero()) {
      Element<K> term = images[i].scaled((*q)[i]);
      for (std::size_t c = 0; c < target_ncoords; ++c) out.coords[c] += term.coords[c];
    }
  return out;
}

}  // namespace

template <class K>
Element<K> apply(const Sheaf<K>& m, const Sheaf<K>& n, const Morphism<K>& f, const Element<K>& x) {
  auto r = apply_on(m.basis(), m.module().ambient(), m.module().nvars(), f.images, n.ncoords(), f.degree, x);
  if (!r) throw std::invalid_argument("element is not a global section of the source");
  return *r;
}

template <class K>
Morphism<K> compose(const Sheaf<K>& n, const Sheaf<K>& p, const Morphism<K>& first, const Morphism<K>& second) {
  Morphism<K> out{first.degree + second.degree, {}};
  for (const auto& y : first.images) out.images.push_back(apply(n, p, second, y));
  return out;
}

template <class K>
Morphism<K> linear_combination(const std::vector<Morphism<K>>& fs, const std::vector<K>& c) {
  if (fs.empty()) throw std::invalid_argument("empty combination");
  Morphism<K> out{fs[0].degree, {}};
  for (const auto& y : fs[0].images) out.images.push_back(zero_element<K>(y.degree, y.coords.size()));
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (c[j].is_zero()) continue;
    for (std::size_t i = 0; i < out.images.size(); ++i)
      for (std::size_t k = 0; k < out.images[i].coords.size(); ++k)
        out.images[i].coords[k] += fs[j].images[i].coords[k].scaled(c[j]);
  }
  return out;
}

template <class K>
Element<K> act(const AlcoveGeometry& g, const std::vector<Poly<K>>& z, int z_degree,
               const std::vector<Alcove>& labels, const Element<K>& x) {
  Element<K> r{x.degree + z_degree, x.coords};
  for (std::size_t c = 0; c < labels.size(); ++c) r.coords[c] = z[g.orbit(labels[c])] * x.coords[c];
  return r;
}

namespace {

template <class K>
const Submodule<K>& cached_orbit_algebra(const AlcoveGeometry& g) {
  static thread_local std::map<std::pair<std::string, int>, Submodule<K>> cache;
  auto key = std::make_pair(g.roots().label(), K::characteristic());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, orbit_algebra<K>(g)).first;
  return it->second;
}

// Generators of the kernel of M -> M^{<= a}, in the coordinates of M.
template <class K>
SectionModule<K> kernel_at(const AlcoveGeometry& g, const Sheaf<K>& m, const Alcove& a) {
  SectionModule<K> k = supported_in_j(g, m, everything(), complement(down_set(g, a)));
  if (!k.certified_rank && m.global.certified_rank)
    throw std::runtime_error("kernel of a restriction could not be certified");
  return k;
}

// Linear constraints on morphisms M -> N of degree d. The unknowns are the
// coefficients of the images of the basis of M in field bases of the
// matching slices of N.
template <class K>
struct HomProblem {
  int d = 0;
  std::vector<std::vector<Element<K>>> candidates;  // per basis element of M
  std::vector<int> offset;
  int unknowns = 0;
  // Basis of the solutions of the constraints added so far; nullopt before the first.
  std::optional<std::vector<std::vector<K>>> solutions;

  bool exhausted() const { return solutions && solutions->empty(); }
};

// Restricts the solutions to those annihilated by a block of constraints,
// given column-wise (one column per unknown).
template <class K>
void add_block(HomProblem<K>& hp, const std::vector<std::vector<K>>& columns) {
  if (columns.empty() || columns[0].empty()) return;
  const std::size_t rows = columns[0].size();
  if (!hp.solutions) {
    std::vector<std::vector<K>> matrix(rows, std::vector<K>(hp.unknowns, K(0)));
    for (int u = 0; u < hp.unknowns; ++u)
      for (std::size_t r = 0; r < rows; ++r) matrix[r][u] = columns[u][r];
    hp.solutions = nullspace(matrix, hp.unknowns);
    return;
  }
  const auto& sol = *hp.solutions;
  const int k = static_cast<int>(sol.size());
  if (k == 0) return;
  std::vector<std::vector<K>> matrix(rows, std::vector<K>(k, K(0)));
  for (int j = 0; j < k; ++j)
    for (int u = 0; u < hp.unknowns; ++u) {
      if (sol[j][u].is_zero()) continue;
      for (std::size_t r = 0; r < rows; ++r)
        if (!columns[u][r].is_zero()) matrix[r][j] += sol[j][u] * columns[u][r];
    }
  std::vector<std::vector<K>> next;
  for (const auto& c : nullspace(matrix, k)) {
    std::vector<K> x(hp.unknowns, K(0));
    for (int j = 0; j < k; ++j)
      if (!c[j].is_zero())
        for (int u = 0; u < hp.unknowns; ++u) x[u] += c[j] * sol[j][u];
    next.push_back(std::move(x));
  }
  hp.solutions = std::move(next);
}

template <class K>
HomProblem<K> hom_problem(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>& n, int d) {
  HomProblem<K> hp;
  hp.d = d;
  const int nvars = g.rank();
  const auto& basis = m.basis();
  for (const auto& b : basis) {
    hp.offset.push_back(hp.unknowns);
    SliceLayout layout(nvars, n.module().ambient(), b.degree + d);
    std::vector<Element<K>> cand;
    if (layout.size > 0) {
      Echelon<K> ech = n.module().slice(layout);
      for (const auto& [p, row] : ech.rows()) cand.push_back(from_dense<K>(row.v, layout, n.ncoords()));
    }
    hp.unknowns += static_cast<int>(cand.size());
    hp.candidates.push_back(std::move(cand));
  }
  if (hp.unknowns == 0) return hp;

  // Z-linearity.
  const Submodule<K>& z = cached_orbit_algebra<K>(g);
  for (const auto& zg : z.generators()) {
    if (zg.degree == 0) continue;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      Element<K> zb = act(g, zg.coords, zg.degree, m.labels(), basis[i]);
      auto q = basis_coefficients(basis, m.module().ambient(), nvars, zb);
      if (!q) throw std::runtime_error("global sections are not a Z-module");
      SliceLayout layout(nvars, n.module().ambient(), zb.degree + d);
      if (layout.size == 0) continue;
      std::vector<std::vector<K>> cols(hp.unknowns, std::vector<K>(layout.size, K(0)));
      for (std::size_t k = 0; k < hp.candidates[i].size(); ++k)
        cols[hp.offset[i] + k] = to_dense(act(g, zg.coords, zg.degree, n.labels(), hp.candidates[i][k]), layout);
      for (std::size_t l = 0; l < basis.size(); ++l) {
        if ((*q)[l].is_zero()) continue;
        for (std::size_t k = 0; k < hp.candidates[l].size(); ++k) {
          auto v = to_dense(hp.candidates[l][k].scaled((*q)[l]), layout);
          auto& col = cols[hp.offset[l] + k];
          for (int r = 0; r < layout.size; ++r) col[r] -= v[r];
        }
      }
      add_block(hp, cols);
      if (hp.exhausted()) return hp;
    }
  }

  // Compatibility with the restriction to each principal ideal of a target label.
  for (const auto& a : n.support()) {
    SectionModule<K> ker = kernel_at(g, m, a);
    std::vector<int> below = coordinates_in<K>(n.labels(), down_set(g, a));
    for (const auto& kappa : ker.module.generators()) {
      auto q = basis_coefficients(basis, m.module().ambient(), nvars, kappa);
      if (!q) throw std::runtime_error("kernel element outside the global sections");
      SliceLayout layout(nvars, n.module().ambient(), kappa.degree + d, &below);
      if (layout.size == 0) continue;
      std::vector<std::vector<K>> cols(hp.unknowns, std::vector<K>(layout.size, K(0)));
      for (std::size_t l = 0; l < basis.size(); ++l) {
        if ((*q)[l].is_zero()) continue;
        for (std::size_t k = 0; k < hp.candidates[l].size(); ++k)
          cols[hp.offset[l] + k] = to_dense(hp.candidates[l][k].scaled((*q)[l]), layout);
      }
      add_block(hp, cols);
      if (hp.exhausted()) return hp;
    }
  }
  return hp;
}

template <class K>
Morphism<K> morphism_from(const Sheaf<K>& m, const Sheaf<K>& n, const HomProblem<K>& hp, const std::vector<K>& c) {
  Morphism<K> f{hp.d, {}};
  for (std::size_t i = 0; i < m.basis().size(); ++i) {
    Element<K> e = zero_element<K>(m.basis()[i].degree + hp.d, n.ncoords());
    for (std::size_t k = 0; k < hp.candidates[i].size(); ++k) {
      const K& x = c[hp.offset[i] + k];
      if (x.is_zero()) continue;
      for (int cc = 0; cc < n.ncoords(); ++cc) e.coords[cc] += hp.candidates[i][k].coords[cc].scaled(x);
    }
    f.images.push_back(std::move(e));
  }
  return f;
}

}  // namespace

template <class K>
std::vector<Morphism<K>> hom_space(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>& n, int d) {
  std::vector<Morphism<K>> out;
  if (m.is_zero() || n.is_zero()) return out;
  HomProblem<K> hp = hom_problem(g, m, n, d);
  if (hp.unknowns == 0) return out;
  if (!hp.solutions) {
    for (int u = 0; u < hp.unknowns; ++u) {
      std::vector<K> c(hp.unknowns, K(0));
      c[u] = K(1);
      out.push_back(morphism_from(m, n, hp, c));
    }
    return out;
  }
  for (const auto& c : *hp.solutions) out.push_back(morphism_from(m, n, hp, c));
  return out;
}

template <class K>
bool is_morphism(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>& n, const Morphism<K>& f) {
  const int nvars = g.rank();
  const auto& basis = m.basis();
  if (f.images.size() != basis.size()) return false;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (static_cast<int>(f.images[i].coords.size()) != n.ncoords()) return false;
    if (!f.images[i].is_zero() && !n.module().contains(f.images[i])) return false;
  }
  const Submodule<K>& z = cached_orbit_algebra<K>(g);
  for (const auto& zg : z.generators())
    for (std::size_t i = 0; i < basis.size(); ++i) {
      Element<K> zb = act(g, zg.coords, zg.degree, m.labels(), basis[i]);
      Element<K> lhs = act(g, zg.coords, zg.degree, n.labels(), f.images[i]);
      Element<K> rhs = apply(m, n, f, zb);
      lhs.degree = rhs.degree;
      if (!(lhs - rhs).is_zero()) return false;
    }
  for (const auto& a : n.support()) {
    SectionModule<K> ker = kernel_at(g, m, a);
    std::vector<int> below = coordinates_in<K>(n.labels(), down_set(g, a));
    for (const auto& kappa : ker.module.generators()) {
      Element<K> y = apply(m, n, f, kappa);
      for (int c : below)
        if (!y.coords[c].is_zero()) return false;
    }
  }
  (void)nvars;
  return true;
}

template <class K>
std::vector<K> flatten(const Sheaf<K>& m, const Sheaf<K>& n, const Morphism<K>& f) {
  std::vector<K> out;
  for (std::size_t i = 0; i < m.basis().size(); ++i) {
    SliceLayout layout(n.module().nvars(), n.module().ambient(), m.basis()[i].degree + f.degree);
    auto v = to_dense(f.images[i], layout);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

namespace {

// The map induced on sections over J (coordinates `keep_src` -> `keep_tgt`).
template <class K>
struct Restricted {
  SectionModule<K> sections;
  std::vector<Element<K>> generators;  // projections of the global basis
  std::vector<Element<K>> images;      // projections of their images
};

template <class K>
Restricted<K> restricted(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>* n, const Morphism<K>* f,
                         const AlcoveSet& j) {
  Restricted<K> r;
  r.sections = sections(g, m, j);
  std::vector<int> ks = coordinates_in<K>(m.labels(), j);
  for (const auto& b : m.basis()) r.generators.push_back(restrict_element(b, ks));
  if (n && f) {
    std::vector<int> kt = coordinates_in<K>(n->labels(), j);
    for (const auto& y : f->images) r.images.push_back(restrict_element(y, kt));
  }
  return r;
}

template <class K>
std::optional<Element<K>> apply_restricted(const Restricted<K>& r, const Submodule<K>& src, std::size_t tgt_ncoords,
                                           int degree, const Element<K>& x) {
  return apply_on(r.generators, src.ambient(), src.nvars(), r.images, tgt_ncoords, degree, x);
}

// Exactness of 0 -> A -> B -> C -> 0 given bases of A, B, C inside the
// coordinate spaces, and the two maps as functions on elements.
template <class K, class F, class H>
std::string short_exact(const SectionModule<K>& a, const SectionModule<K>& b, const SectionModule<K>& c, F&& f,
                        H&& h, int nvars) {
  if (!a.certified_rank || !b.certified_rank || !c.certified_rank) return "a term is not certified graded free";
  if (*b.certified_rank != *a.certified_rank + *c.certified_rank) return "ranks are not additive";
  std::vector<Element<K>> fa;
  for (const auto& x : a.module.generators()) {
    auto y = f(x);
    if (!y) return "first map undefined";
    if (!y->is_zero() && !b.module.contains(*y)) return "first map leaves the middle term";
    fa.push_back(*y);
    auto z = h(*y);
    if (!z) return "second map undefined";
    if (!z->is_zero()) return "composite is nonzero";
  }
  if (generic_rank(fa, nvars, b.ncoords()) != static_cast<int>(fa.size())) return "first map is not injective";
  std::vector<Element<K>> hb;
  for (const auto& x : b.module.generators()) {
    auto z = h(x);
    if (!z) return "second map undefined";
    if (!z->is_zero()) hb.push_back(*z);
  }
  Submodule<K> image(nvars, c.module.ambient(), hb);
  for (const auto& y : c.module.generators())
    if (!image.contains(y)) return "second map is not surjective";
  return {};
}

}  // namespace

template <class K>
ExactReport check_exact(const AlcoveGeometry& g, const Sheaf<K>& m, const Morphism<K>& f, const Sheaf<K>& n,
                        const Morphism<K>& h, const Sheaf<K>& p) {
  ExactReport rep;
  const int nvars = g.rank();
  std::set<Alcove> alcoves;
  for (const auto* s : {&m, &n, &p}) alcoves.insert(s->labels().begin(), s->labels().end());

  auto run = [&](const AlcoveSet& j, const AlcoveSet& k, const std::string& where) {
    Restricted<K> rm = restricted(g, m, &n, &f, j), rn = restricted(g, n, &p, &h, j);
    SectionModule<K> sa, sb, sc;
    if (k) {
      sa = supported_in_j(g, m, j, k);
      sb = supported_in_j(g, n, j, k);
      sc = supported_in_j(g, p, j, k);
    } else {
      sa = rm.sections;
      sb = rn.sections;
      sc = sections(g, p, j);
    }
    auto fa = [&](const Element<K>& x) {
      return apply_restricted(rm, rm.sections.module, rn.sections.ncoords(), f.degree, x);
    };
    auto hb = [&](const Element<K>& x) {
      return apply_restricted(rn, rn.sections.module, sc.ncoords(), h.degree, x);
    };
    std::string why = short_exact(sa, sb, sc, fa, hb, nvars);
    if (!why.empty() && rep.exact) {
      rep.exact = false;
      rep.witness = where + ": " + why;
    }
  };
  for (const auto& a : alcoves) {
    run(down_set(g, a), member_of({a}), "subquotient at " + g.format(a));
    if (!rep.exact) return rep;
  }
  for (const auto& a : alcoves) {
    run(down_set(g, a), nullptr, "sections below " + g.format(a));
    if (!rep.exact) return rep;
  }
  run(everything(), nullptr, "global sections");
  return rep;
}

namespace {

template <class K>
Poly<K> gamma_for(const AlcoveGeometry& g, int root) {
  Poly<K> gamma(K(1));
  for (int b = 0; b < g.roots().num_positive(); ++b)
    if (b != root) gamma = gamma * coroot_poly<K>(g, b);
  return gamma;
}

bool same_string(const AlcoveGeometry& g, const Alcove& a, const Alcove& b, int root) {
  if (a == b) return true;
  if (auto rb = reflection_between(g, a, b); rb && rb->first == root) return true;
  if (a.w != b.w) return false;
  const IVec& r = g.roots().root(root);
  std::optional<long> k;
  for (std::size_t i = 0; i < r.size(); ++i) {
    long diff = b.t[i] - a.t[i];
    if (r[i] == 0) {
      if (diff != 0) return false;
      continue;
    }
    if (diff % r[i] != 0) return false;
    if (k && *k != diff / r[i]) return false;
    k = diff / r[i];
  }
  return true;
}

}  // namespace

template <class K>
CategoryReport certify_category_C(const AlcoveGeometry& g, const Sheaf<K>& m) {
  CategoryReport rep;
  const std::vector<Alcove> supp = m.support();
  const int nvars = g.rank();

  if (!m.global.certified_rank) rep.flabby = {false, "global sections not certified"};
  for (const auto& a : supp) {
    if (!rep.flabby.pass) break;
    SectionModule<K> sub = sections_supported(g, m, down_set(g, a), member_of({a}));
    if (!sub.certified_rank) rep.flabby = {false, "rank accounting fails below " + g.format(a)};
  }

  const Submodule<K>& z = cached_orbit_algebra<K>(g);
  for (const auto& zg : z.generators()) {
    for (std::size_t i = 0; i < m.basis().size() && rep.z_module.pass; ++i)
      if (!m.module().contains(act(g, zg.coords, zg.degree, m.labels(), m.basis()[i])))
        rep.z_module = {false, "Z does not preserve the global sections (generator " + std::to_string(i) + ")"};
  }

  for (const auto& a : supp) {
    if (!rep.support.pass) break;
    SectionModule<K> sub = subquotient(g, m, {a});
    for (const auto& zg : z.generators())
      for (const auto& x : sub.module.generators()) {
        Element<K> lhs = act(g, zg.coords, zg.degree, sub.labels, x);
        Element<K> rhs = x.scaled(zg.coords[g.orbit(a)]);
        rhs.degree = lhs.degree;
        if (!(lhs - rhs).is_zero()) rep.support = {false, "Z acts on the subquotient at " + g.format(a) + " through another orbit"};
      }
  }

  for (int root = 0; root < g.roots().num_positive() && rep.local_extension.pass; ++root) {
    std::vector<int> string_of(m.ncoords(), -1);
    int strings = 0;
    for (int c = 0; c < m.ncoords(); ++c) {
      if (string_of[c] >= 0) continue;
      string_of[c] = strings;
      for (int e = c + 1; e < m.ncoords(); ++e)
        if (string_of[e] < 0 && same_string(g, m.labels()[c], m.labels()[e], root)) string_of[e] = strings;
      ++strings;
    }
    if (strings <= 1) continue;
    Poly<K> gamma = gamma_for<K>(g, root);
    for (std::size_t i = 0; i < m.basis().size() && rep.local_extension.pass; ++i)
      for (int s = 0; s < strings && rep.local_extension.pass; ++s) {
        Element<K> part = m.basis()[i];
        bool whole = true;
        for (int c = 0; c < m.ncoords(); ++c)
          if (string_of[c] != s) {
            if (!part.coords[c].is_zero()) whole = false;
            part.coords[c] = Poly<K>();
          }
        if (whole || part.is_zero()) continue;
        bool found = false;
        Element<K> probe = part;
        for (int power = 1; power <= 8 && !found; power *= 2) {
          probe = part.scaled(gamma.pow(power));
          found = m.module().contains(probe);
        }
        if (!found)
          rep.local_extension = {false, "the part of generator " + std::to_string(i) + " on the string of " +
                                            g.format(m.labels()[std::find(string_of.begin(), string_of.end(), s) -
                                                                string_of.begin()]) +
                                            " does not split off for root " + std::to_string(root)};
      }
  }

  try {
    verma_ranks(g, m);
  } catch (const std::exception& e) {
    rep.verma_flag = {false, e.what()};
  }
  (void)nvars;
  return rep;
}

#define ALCSHEAF_INSTANTIATE(K)                                                                               \
  template struct Sheaf<K>;                                                                                   \
  template Sheaf<K> make_sheaf(const AlcoveGeometry&, std::vector<Alcove>, std::vector<int>,                  \
                               std::vector<Element<K>>);                                                      \
  template Sheaf<K> zero_sheaf(const AlcoveGeometry&);                                                        \
  template Sheaf<K> standard_sheaf(const AlcoveGeometry&, const Alcove&);                                     \
  template Sheaf<K> section_sheaf(const AlcoveGeometry&, const Weight&, bool, FlabbyReport*);                 \
  template FlabbyReport verify_section_flabby(const AlcoveGeometry&, const Weight&, const Sheaf<K>&);         \
  template Sheaf<K> shifted(const Sheaf<K>&, int);                                                            \
  template Sheaf<K> direct_sum(const Sheaf<K>&, const Sheaf<K>&);                                             \
  template SectionModule<K> sections(const AlcoveGeometry&, const Sheaf<K>&, const AlcoveSet&);               \
  template SectionModule<K> sections_supported(const AlcoveGeometry&, const Sheaf<K>&, const AlcoveSet&,      \
                                               const AlcoveSet&);                                             \
  template SectionModule<K> subquotient(const AlcoveGeometry&, const Sheaf<K>&, const std::vector<Alcove>&,   \
                                        SubquotientRoute);                                                    \
  template VermaTable verma_ranks(const AlcoveGeometry&, const Sheaf<K>&);                                    \
  template Sheaf<K> open_part(const AlcoveGeometry&, const Sheaf<K>&, const AlcoveSet&);                      \
  template Sheaf<K> closed_part(const AlcoveGeometry&, const Sheaf<K>&, const AlcoveSet&);                    \
  template Morphism<K> zero_morphism(const Sheaf<K>&, const Sheaf<K>&, int);                                  \
  template Morphism<K> identity_morphism(const Sheaf<K>&);                                                    \
  template Morphism<K> restriction_morphism(const AlcoveGeometry&, const Sheaf<K>&, const AlcoveSet&);        \
  template Morphism<K> inclusion_morphism(const AlcoveGeometry&, const Sheaf<K>&, const Sheaf<K>&,            \
                                          const AlcoveSet&);                                                  \
  template Element<K> apply(const Sheaf<K>&, const Sheaf<K>&, const Morphism<K>&, const Element<K>&);         \
  template Morphism<K> compose(const Sheaf<K>&, const Sheaf<K>&, const Morphism<K>&, const Morphism<K>&);     \
  template Morphism<K> linear_combination(const std::vector<Morphism<K>>&, const std::vector<K>&);            \
  template Element<K> act(const AlcoveGeometry&, const std::vector<Poly<K>>&, int, const std::vector<Alcove>&, \
                          const Element<K>&);                                                                 \
  template std::vector<Morphism<K>> hom_space(const AlcoveGeometry&, const Sheaf<K>&, const Sheaf<K>&, int);  \
  template bool is_morphism(const AlcoveGeometry&, const Sheaf<K>&, const Sheaf<K>&, const Morphism<K>&);     \
  template std::vector<K> flatten(const Sheaf<K>&, const Sheaf<K>&, const Morphism<K>&);                      \
  template ExactReport check_exact(const AlcoveGeometry&, const Sheaf<K>&, const Morphism<K>&,                \
                                   const Sheaf<K>&, const Morphism<K>&, const Sheaf<K>&);                     \
  template CategoryReport certify_category_C(const AlcoveGeometry&, const Sheaf<K>&);

ALCSHEAF_INSTANTIATE(Rational)
ALCSHEAF_INSTANTIATE(ModP)

}  // namespace alcsheaf
