#include "alcsheaf/zmod.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace alcsheaf {

namespace {
thread_local int cap_override = -1;
}

int default_cap(const AlcoveGeometry& g, int max_generator_degree) {
  if (cap_override >= 0) return std::max({cap_override, max_generator_degree, 2});
  return max_generator_degree + 2 * g.roots().num_positive() + 4;
}

DegreeCapScope::DegreeCapScope(int cap) : saved_(cap_override) { cap_override = cap; }
DegreeCapScope::~DegreeCapScope() { cap_override = saved_; }

std::optional<std::pair<int, long>> reflection_between(const AlcoveGeometry& g, const Alcove& a,
                                                       const Alcove& b) {
  IVec ba = g.bary(a), bb = g.bary(b);
  for (int r = 0; r < g.roots().num_positive(); ++r) {
    long sum = g.roots().pair(ba, r) + g.roots().pair(bb, r);
    if (sum % (2 * g.scale()) != 0) continue;
    long n = sum / (2 * g.scale());
    if (g.reflect(a, r, n) == b) return std::make_pair(r, n);
  }
  return std::nullopt;
}

template <class K>
Poly<K> coroot_poly(const AlcoveGeometry& g, int root) {
  return Poly<K>::linear_form(g.roots().coroot_form(root));
}

namespace {

struct OrbitGraph {
  std::vector<int> orbits;                       // w per vertex
  std::vector<std::tuple<int, int, int>> edges;  // (u, v, root)
};

int components(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int count = n;
  for (auto [u, v] : edges) {
    int a = find(u), b = find(v);
    if (a != b) parent[a] = b, --count;
  }
  return count;
}

// Structure algebra on the vertices of a labelled orbit graph, with the
// determinant-degree certificate.
template <class K>
Submodule<K> graph_algebra(const AlcoveGeometry& g, const OrbitGraph& graph, int cap) {
  const int nv = static_cast<int>(graph.orbits.size());
  const int ne = static_cast<int>(graph.edges.size());
  const int nvars = g.rank();
  long bound = 0;
  for (int r = 0; r < g.roots().num_positive(); ++r) {
    std::vector<std::pair<int, int>> es;
    for (auto [u, v, root] : graph.edges)
      if (root == r) es.push_back({u, v});
    bound += 2 * (nv - components(nv, es));
  }
  GradedMatrix<K> f;
  f.nvars = nvars;
  f.row_degrees.assign(ne, 0);
  for (int o = 0; o < nv; ++o) {
    Element<K> col{0, std::vector<Poly<K>>(ne)};
    for (int e = 0; e < ne; ++e) {
      auto [u, v, root] = graph.edges[e];
      if (u == o) col.coords[e] = Poly<K>(K(1));
      if (v == o) col.coords[e] = Poly<K>(K(-1));
    }
    f.col_degrees.push_back(0);
    f.columns.push_back(std::move(col));
  }
  for (int e = 0; e < ne; ++e) {
    Element<K> col{2, std::vector<Poly<K>>(ne)};
    col.coords[e] = -coroot_poly<K>(g, std::get<2>(graph.edges[e]));
    f.col_degrees.push_back(2);
    f.columns.push_back(std::move(col));
  }
  if (cap < 0) cap = default_cap(g, 0);
  std::vector<int> keep(nv);
  std::iota(keep.begin(), keep.end(), 0);
  for (int attempt = 0; attempt < 4; ++attempt, cap *= 2) {
    Submodule<K> z;
    if (ne == 0) {
      std::vector<Element<K>> unit;
      for (int o = 0; o < nv; ++o) {
        Element<K> x{0, std::vector<Poly<K>>(nv)};
        x.coords[o] = Poly<K>(K(1));
        unit.push_back(std::move(x));
      }
      z = Submodule<K>(nvars, std::vector<int>(nv, 0), std::move(unit));
    } else {
      z = graded_kernel(f, cap).project(keep).minimal();
    }
    auto basis = z.free_basis();
    if (!basis || static_cast<int>(basis->size()) != nv) continue;
    long degree = 0;
    for (const auto& b : *basis) degree += b.degree;
    if (degree == bound) return Submodule<K>(nvars, std::vector<int>(nv, 0), *basis);
  }
  throw std::runtime_error("structure algebra: degree-cap certification failure");
}

}  // namespace

template <class K>
SectionModule<K> structure_algebra(const AlcoveGeometry& g, const std::vector<Alcove>& x, int cap) {
  OrbitGraph graph;
  std::map<int, int> vertex;
  std::vector<int> vertex_of(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto [it, fresh] = vertex.try_emplace(g.orbit(x[i]), static_cast<int>(graph.orbits.size()));
    if (fresh) graph.orbits.push_back(g.orbit(x[i]));
    vertex_of[i] = it->second;
  }
  std::set<std::tuple<int, int, int>> seen;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      auto rb = reflection_between(g, x[i], x[j]);
      if (!rb) continue;
      int u = std::min(vertex_of[i], vertex_of[j]), v = std::max(vertex_of[i], vertex_of[j]);
      if (seen.insert({u, v, rb->first}).second) graph.edges.push_back({u, v, rb->first});
    }
  Submodule<K> z = graph_algebra<K>(g, graph, cap);
  std::vector<Element<K>> gens;
  RankSeries rank;
  for (const auto& b : z.generators()) {
    Element<K> e{b.degree, {}};
    for (std::size_t i = 0; i < x.size(); ++i) e.coords.push_back(b.coords[vertex_of[i]]);
    gens.push_back(std::move(e));
    rank += RankSeries::monomial(b.degree);
  }
  return {x, Submodule<K>(g.rank(), std::vector<int>(x.size(), 0), std::move(gens)), rank};
}

template <class K>
Submodule<K> orbit_algebra(const AlcoveGeometry& g) {
  OrbitGraph graph;
  const auto& rs = g.roots();
  for (int w = 0; w < rs.order(); ++w) graph.orbits.push_back(w);
  for (int w = 0; w < rs.order(); ++w)
    for (int r = 0; r < rs.num_positive(); ++r) {
      int v = rs.mul(rs.reflection(r), w);
      if (w < v) graph.edges.push_back({w, v, r});
    }
  return graph_algebra<K>(g, graph, -1);
}

template <class K>
OrbitSet z_support(const AlcoveGeometry& g, const SectionModule<K>& m) {
  OrbitSet out;
  for (const auto& gen : m.module.generators())
    for (int c = 0; c < m.ncoords(); ++c)
      if (!gen.coords[c].is_zero()) out.insert(g.orbit(m.labels[c]));
  return out;
}

template <class K>
SectionModule<K> submodule_supported(const AlcoveGeometry& g, const SectionModule<K>& m, const OrbitSet& t,
                                     int cap) {
  std::vector<bool> allowed(m.ncoords());
  for (int c = 0; c < m.ncoords(); ++c) allowed[c] = t.count(g.orbit(m.labels[c])) > 0;
  if (cap < 0) cap = default_cap(g, m.module.max_generator_degree());
  std::optional<RankSeries> whole;
  if (m.certified_rank) whole = m.certified_rank;
  else if (m.module.free_basis()) whole = m.module.rank_series();
  SectionModule<K> rest = quotient_supported(g, m, [&] {
    OrbitSet complement;
    for (const auto& a : m.labels)
      if (!t.count(g.orbit(a))) complement.insert(g.orbit(a));
    return complement;
  }());
  SectionModule<K> out{m.labels, Submodule<K>(m.module.nvars(), m.module.ambient()), std::nullopt};
  for (int attempt = 0; attempt < 3; ++attempt, cap *= 2) {
    out.module = m.module.restrict_to(allowed, cap).minimal();
    if (!whole || !rest.certified_rank) return out;
    if (!out.module.free_basis()) continue;
    RankSeries part = out.module.rank_series();
    if (part + *rest.certified_rank == *whole) {
      out.certified_rank = part;
      return out;
    }
  }
  return out;
}

template <class K>
SectionModule<K> quotient_supported(const AlcoveGeometry& g, const SectionModule<K>& m, const OrbitSet& t) {
  std::vector<int> keep;
  std::vector<Alcove> labels;
  for (int c = 0; c < m.ncoords(); ++c)
    if (t.count(g.orbit(m.labels[c]))) keep.push_back(c), labels.push_back(m.labels[c]);
  SectionModule<K> out{labels, m.module.project(keep).minimal(), std::nullopt};
  if (out.module.free_basis()) out.certified_rank = out.module.rank_series();
  return out;
}

template <class K>
Factorization<K> factor_through(const AlcoveGeometry& g, const SectionModule<K>& m,
                                const std::vector<Element<K>>& basis_images, const SectionModule<K>& n,
                                const OrbitSet& t) {
  const auto& basis = m.module.generators();
  if (basis.size() != basis_images.size()) throw std::invalid_argument("one image per basis element expected");
  Submodule<K> image(n.module.nvars(), n.module.ambient(), basis_images);
  for (const auto& gen : n.module.generators())
    if (!image.contains(gen)) throw std::invalid_argument("f is not surjective");
  Factorization<K> out;
  std::vector<int> amb;
  for (int c = 0; c < m.ncoords(); ++c)
    if (!t.count(g.orbit(m.labels[c]))) {
      out.middle.labels.push_back(m.labels[c]);
      amb.push_back(m.module.ambient()[c]);
    }
  const int away = static_cast<int>(amb.size());
  for (int c = 0; c < n.ncoords(); ++c) {
    out.middle.labels.push_back(n.labels[c]);
    amb.push_back(n.module.ambient()[c]);
    out.f2_coordinates.push_back(away + c);
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Element<K> e{basis[i].degree, {}};
    for (int c = 0; c < m.ncoords(); ++c)
      if (!t.count(g.orbit(m.labels[c]))) e.coords.push_back(basis[i].coords[c]);
    for (int c = 0; c < n.ncoords(); ++c) e.coords.push_back(basis_images[i].coords[c]);
    out.f1_images.push_back(e);
  }
  out.middle.module = Submodule<K>(m.module.nvars(), amb, out.f1_images);
  if (out.middle.module.free_basis()) out.middle.certified_rank = out.middle.module.rank_series();
  return out;
}

namespace {

// Degree-2 anti-invariant element of z with all coordinates nonzero.
template <class K>
Element<K> find_delta(const Submodule<K>& z, const std::vector<int>& partner) {
  const int n = z.ncoords();
  std::vector<Element<K>> anti;
  for (int c = 0; c < n; ++c)
    if (c < partner[c]) {
      Element<K> e{0, std::vector<Poly<K>>(n)};
      e.coords[c] = Poly<K>(K(1));
      e.coords[partner[c]] = Poly<K>(K(-1));
      anti.push_back(std::move(e));
    }
  Submodule<K> both = module_intersection(z, Submodule<K>(z.nvars(), z.ambient(), anti), 2);
  SliceLayout layout(z.nvars(), z.ambient(), 2);
  for (const auto& v : degree_slice(both, 2)) {
    Element<K> d = from_dense<K>(v, layout, n);
    if (std::none_of(d.coords.begin(), d.coords.end(), [](const Poly<K>& p) { return p.is_zero(); }))
      return d;
  }
  throw std::runtime_error("no degree-2 anti-invariant element with all coordinates nonzero");
}

}  // namespace

template <class K>
SSplit<K> s_split(const AlcoveGeometry& g, const std::vector<Alcove>& j, Wall s) {
  if (K::characteristic() == 2) throw std::invalid_argument("characteristic 2 is not supported");
  std::map<Alcove, int> index;
  for (std::size_t i = 0; i < j.size(); ++i) index[j[i]] = static_cast<int>(i);
  std::vector<int> partner(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto it = index.find(g.right_act(j[i], s));
    if (it == index.end()) throw std::invalid_argument("alcove set is not s-invariant");
    partner[i] = it->second;
  }
  SectionModule<K> z = structure_algebra<K>(g, j);
  const int n = z.ncoords();
  std::vector<Element<K>> inv;
  for (int c = 0; c < n; ++c)
    if (c < partner[c]) {
      Element<K> e{0, std::vector<Poly<K>>(n)};
      e.coords[c] = Poly<K>(K(1));
      e.coords[partner[c]] = Poly<K>(K(1));
      inv.push_back(std::move(e));
    }
  SSplit<K> out;
  out.invariant = module_intersection(z.module, Submodule<K>(z.module.nvars(), z.module.ambient(), inv),
                                      default_cap(g, z.module.max_generator_degree()))
                      .minimal();
  out.delta = find_delta(z.module, partner);
  return out;
}

template <class K>
std::vector<Poly<K>> global_delta(const AlcoveGeometry& g, Wall s) {
  Submodule<K> z = orbit_algebra<K>(g);
  std::vector<int> partner(g.roots().order());
  for (int w = 0; w < g.roots().order(); ++w) partner[w] = g.orbit_right_act(w, s);
  return find_delta(z, partner).coords;
}

template <class K>
std::string dump_generators(const AlcoveGeometry& g, const std::vector<Alcove>& labels,
                            const std::vector<Element<K>>& gens) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& gen : gens) {
    nlohmann::ordered_json one = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < labels.size(); ++c) one.push_back({g.format(labels[c]), gen.coords[c].str()});
    out.push_back({{"degree", gen.degree}, {"coordinates", one}});
  }
  return out.dump(2);
}

#define ALCSHEAF_INSTANTIATE(K)                                                                          \
  template Poly<K> coroot_poly(const AlcoveGeometry&, int);                                              \
  template SectionModule<K> structure_algebra(const AlcoveGeometry&, const std::vector<Alcove>&, int);   \
  template Submodule<K> orbit_algebra(const AlcoveGeometry&);                                            \
  template OrbitSet z_support(const AlcoveGeometry&, const SectionModule<K>&);                           \
  template SectionModule<K> submodule_supported(const AlcoveGeometry&, const SectionModule<K>&,          \
                                                const OrbitSet&, int);                                   \
  template SectionModule<K> quotient_supported(const AlcoveGeometry&, const SectionModule<K>&,           \
                                               const OrbitSet&);                                         \
  template Factorization<K> factor_through(const AlcoveGeometry&, const SectionModule<K>&,               \
                                           const std::vector<Element<K>>&, const SectionModule<K>&,      \
                                           const OrbitSet&);                                             \
  template SSplit<K> s_split(const AlcoveGeometry&, const std::vector<Alcove>&, Wall);                   \
  template std::vector<Poly<K>> global_delta(const AlcoveGeometry&, Wall);                               \
  template std::string dump_generators(const AlcoveGeometry&, const std::vector<Alcove>&,                \
                                       const std::vector<Element<K>>&);

ALCSHEAF_INSTANTIATE(Rational)
ALCSHEAF_INSTANTIATE(ModP)

}  // namespace alcsheaf
