#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alcsheaf/zmod.hpp"

namespace alcsheaf {

/// A finitely supported flabby sheaf of Z-modules, realized by labelled
/// coordinates: the sections over an open set J are the projection of the
/// global module onto the coordinates whose label lies in J, and restriction
/// maps are coordinate projections. The global generators form a free basis.
template <class K>
struct Sheaf {
  SectionModule<K> global;

  const std::vector<Alcove>& labels() const { return global.labels; }
  const Submodule<K>& module() const { return global.module; }
  const std::vector<Element<K>>& basis() const { return global.module.generators(); }
  int ncoords() const { return global.ncoords(); }
  bool is_zero() const { return global.module.is_zero(); }
  /// Distinct labels, sorted.
  std::vector<Alcove> support() const;
};

/// Membership predicate on alcoves; open sets and locally closed sets are
/// only ever evaluated on labels.
using AlcoveSet = std::function<bool(const Alcove&)>;

AlcoveSet down_set(const AlcoveGeometry& g, const Alcove& a);
AlcoveSet strict_down_set(const AlcoveGeometry& g, const Alcove& a);
AlcoveSet member_of(std::vector<Alcove> alcoves);

/// Builds a sheaf from generators; throws unless they span a graded free module.
template <class K>
Sheaf<K> make_sheaf(const AlcoveGeometry& g, std::vector<Alcove> labels, std::vector<int> ambient,
                    std::vector<Element<K>> generators);

template <class K>
Sheaf<K> zero_sheaf(const AlcoveGeometry& g);

template <class K>
Sheaf<K> standard_sheaf(const AlcoveGeometry& g, const Alcove& a);

struct FlabbyReport {
  bool ok = true;
  int ideals_checked = 0;
  std::string witness;
};

/// The sheaf of the special section K_lambda, labels ordered as tau(x) for x in W_0.
/// With `verify`, surjectivity onto Z(K_lambda cap J) is certified for every
/// down-closed J; a failure throws.
template <class K>
Sheaf<K> section_sheaf(const AlcoveGeometry& g, const Weight& lambda, bool verify = true,
                       FlabbyReport* report = nullptr);

template <class K>
FlabbyReport verify_section_flabby(const AlcoveGeometry& g, const Weight& lambda, const Sheaf<K>& m);

/// Degrees drop by l.
template <class K>
Sheaf<K> shifted(const Sheaf<K>& m, int l);

template <class K>
Sheaf<K> direct_sum(const Sheaf<K>& a, const Sheaf<K>& b);

/// Sections over the open set J, with a certified rank when graded free.
template <class K>
SectionModule<K> sections(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j);

/// Sections over J that vanish outside the locally closed K (K inside J).
/// Certified by rank accounting against J minus K when both are free.
template <class K>
SectionModule<K> sections_supported(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j,
                                    const AlcoveSet& k);

enum class SubquotientRoute { down_closure, complement_of_strict_up };

/// M_[K] for a locally closed set K, listed by alcoves. Throws when K is not
/// convex among the labels.
template <class K>
SectionModule<K> subquotient(const AlcoveGeometry& g, const Sheaf<K>& m, const std::vector<Alcove>& k,
                             SubquotientRoute route = SubquotientRoute::down_closure);

using VermaTable = std::map<Alcove, RankSeries>;

/// {A -> rank series of M_[A]}; throws when some subquotient is not graded free
/// or the ranks do not add up to the global rank.
template <class K>
VermaTable verma_ranks(const AlcoveGeometry& g, const Sheaf<K>& m);

std::string verma_json(const AlcoveGeometry& g, const VermaTable& t);
std::string verma_csv(const AlcoveGeometry& g, const VermaTable& t);
VermaTable shifted(const VermaTable& t, int exponent);

/// The restriction to an open set, as a sheaf, and the subsheaf of sections
/// supported on the closed complement.
template <class K>
Sheaf<K> open_part(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j);
template <class K>
Sheaf<K> closed_part(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j);

/// A sheaf morphism of the given degree, determined by the images of the
/// source basis in the target coordinates.
template <class K>
struct Morphism {
  int degree = 0;
  std::vector<Element<K>> images;
};

template <class K>
Morphism<K> zero_morphism(const Sheaf<K>& m, const Sheaf<K>& n, int degree);
template <class K>
Morphism<K> identity_morphism(const Sheaf<K>& m);
/// Coordinate projection M -> open_part(M, J).
template <class K>
Morphism<K> restriction_morphism(const AlcoveGeometry& g, const Sheaf<K>& m, const AlcoveSet& j);
/// Inclusion closed_part(M, J) -> M.
template <class K>
Morphism<K> inclusion_morphism(const AlcoveGeometry& g, const Sheaf<K>& closed, const Sheaf<K>& m,
                               const AlcoveSet& j);

/// Image of a global section of M (an element of its coordinate space).
template <class K>
Element<K> apply(const Sheaf<K>& m, const Sheaf<K>& n, const Morphism<K>& f, const Element<K>& x);
/// Second after first, for first: M -> N and second: N -> P.
template <class K>
Morphism<K> compose(const Sheaf<K>& n, const Sheaf<K>& p, const Morphism<K>& first, const Morphism<K>& second);
template <class K>
Morphism<K> linear_combination(const std::vector<Morphism<K>>& fs, const std::vector<K>& c);

/// Field basis of degree-d sheaf morphisms M -> N.
template <class K>
std::vector<Morphism<K>> hom_space(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>& n, int d);

/// Z-linearity and compatibility with every restriction.
template <class K>
bool is_morphism(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>& n, const Morphism<K>& f);

/// Dense coordinates of a morphism (images in the degree slices of N).
template <class K>
std::vector<K> flatten(const Sheaf<K>& m, const Sheaf<K>& n, const Morphism<K>& f);

struct ExactReport {
  bool exact = true;
  std::string witness;
};

/// 0 -> M -> N -> P -> 0 exact: checked on every subquotient and cross-checked
/// on the sections over every principal ideal.
template <class K>
ExactReport check_exact(const AlcoveGeometry& g, const Sheaf<K>& m, const Morphism<K>& f, const Sheaf<K>& n,
                        const Morphism<K>& h, const Sheaf<K>& p);

struct Condition {
  bool pass = true;
  std::string witness;
};

struct CategoryReport {
  Condition flabby;
  Condition z_module;
  Condition support;
  Condition local_extension;
  Condition verma_flag;
  bool all() const {
    return flabby.pass && z_module.pass && support.pass && local_extension.pass && verma_flag.pass;
  }
};

template <class K>
CategoryReport certify_category_C(const AlcoveGeometry& g, const Sheaf<K>& m);

/// The element z of the orbit algebra acting on a coordinate vector.
template <class K>
Element<K> act(const AlcoveGeometry& g, const std::vector<Poly<K>>& z, int z_degree,
               const std::vector<Alcove>& labels, const Element<K>& x);

}  // namespace alcsheaf
