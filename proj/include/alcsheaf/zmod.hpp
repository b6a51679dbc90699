#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alcsheaf/alcoves.hpp"
#include "alcsheaf/gralg.hpp"

namespace alcsheaf {

/// A submodule of the free module with one copy of S per labelled coordinate.
/// Labels may repeat. The structure algebra acts on the coordinate labelled A
/// through the component at the ZR-orbit of A.
template <class K>
struct SectionModule {
  std::vector<Alcove> labels;
  Submodule<K> module;
  std::optional<RankSeries> certified_rank;

  int ncoords() const { return static_cast<int>(labels.size()); }
};

/// A set of ZR-orbits, identified with elements of W_0.
using OrbitSet = std::set<int>;

/// The structure algebra of a finite alcove set, with a free basis
/// certified by the degree of its determinant.
template <class K>
SectionModule<K> structure_algebra(const AlcoveGeometry& g, const std::vector<Alcove>& x, int cap = -1);

/// The structure algebra on all of W_0, one coordinate per orbit (indexed by w).
template <class K>
Submodule<K> orbit_algebra(const AlcoveGeometry& g);

template <class K>
OrbitSet z_support(const AlcoveGeometry& g, const SectionModule<K>& m);

/// Largest submodule supported on T (M_T).
template <class K>
SectionModule<K> submodule_supported(const AlcoveGeometry& g, const SectionModule<K>& m, const OrbitSet& t,
                                     int cap = -1);

/// Image in the coordinates over T (M^T).
template <class K>
SectionModule<K> quotient_supported(const AlcoveGeometry& g, const SectionModule<K>& m, const OrbitSet& t);

/// [f, T]: the image of M in (coordinates away from T) + N. The generators
/// of M must form a free basis; basis_images[i] is the image of the i-th one.
template <class K>
struct Factorization {
  SectionModule<K> middle;
  std::vector<Element<K>> f1_images;  // images of the basis of M
  std::vector<int> f2_coordinates;     // coordinates of `middle` that map onto N
};

template <class K>
Factorization<K> factor_through(const AlcoveGeometry& g, const SectionModule<K>& m,
                                const std::vector<Element<K>>& basis_images, const SectionModule<K>& n,
                                const OrbitSet& t);

template <class K>
struct SSplit {
  Submodule<K> invariant;    // generators of the s-invariant part
  Element<K> delta;          // degree 2, anti-invariant, every coordinate nonzero
};

/// Splitting of the structure algebra of an s-invariant alcove set.
template <class K>
SSplit<K> s_split(const AlcoveGeometry& g, const std::vector<Alcove>& j, Wall s);

/// The anti-invariant degree-2 element on W_0 orbits, one polynomial per w.
template <class K>
std::vector<Poly<K>> global_delta(const AlcoveGeometry& g, Wall s);

/// Default degree cap. Adaptive callers double it until certification succeeds.
int default_cap(const AlcoveGeometry& g, int max_generator_degree);

/// Replaces the starting degree cap on this thread while in scope.
class DegreeCapScope {
 public:
  explicit DegreeCapScope(int cap);
  ~DegreeCapScope();
  DegreeCapScope(const DegreeCapScope&) = delete;
  DegreeCapScope& operator=(const DegreeCapScope&) = delete;

 private:
  int saved_;
};

template <class K>
std::string dump_generators(const AlcoveGeometry& g, const std::vector<Alcove>& labels,
                            const std::vector<Element<K>>& gens);

/// Linear form of the coroot of a positive root as a polynomial.
template <class K>
Poly<K> coroot_poly(const AlcoveGeometry& g, int root);

/// The root a and integer n with b = s_{a,n}(a_), or nullopt.
std::optional<std::pair<int, long>> reflection_between(const AlcoveGeometry& g, const Alcove& a,
                                                       const Alcove& b);

}  // namespace alcsheaf
