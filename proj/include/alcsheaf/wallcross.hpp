#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alcsheaf/sheaves.hpp"

namespace alcsheaf {

/// Z tensored over the s-invariants, shifted by one. The result has the
/// labels of M followed by their images under s, every ambient degree lowered
/// by one, and basis (m, m) then (delta m, -delta m) over a basis m of M.
template <class K>
SectionModule<K> epsilon(const AlcoveGeometry& g, const SectionModule<K>& m, Wall s);

/// The wall crossing functor on sheaves; sections over s-invariant open sets
/// are epsilon of the sections of M.
template <class K>
Sheaf<K> theta(const AlcoveGeometry& g, const Sheaf<K>& m, Wall s);

/// The induced morphism theta(M) -> theta(N).
template <class K>
Morphism<K> theta(const AlcoveGeometry& g, const Sheaf<K>& n, const Morphism<K>& f, Wall s);

/// Sections of theta(M) over J computed from epsilon of the sections over
/// J-sharp and J-flat, factoring away from the s-dominant orbits.
template <class K>
SectionModule<K> theta_sections_factored(const AlcoveGeometry& g, const Sheaf<K>& m, Wall s, const AlcoveSet& j);

struct AdjunctionReport {
  bool ok = true;
  std::vector<std::pair<int, int>> dims;  // (dim Hom(theta M, N), dim Hom(M, theta N)) per degree
};

template <class K>
AdjunctionReport check_selfadjoint(const AlcoveGeometry& g, const Sheaf<K>& m, const Sheaf<K>& n, Wall s,
                                   const std::vector<int>& degrees);

struct WallCrossingPlan {
  Alcove target;
  Weight lambda;
  Alcove base;
  std::vector<Wall> word;
};

/// target = base s_1 ... s_n with strictly decreasing partial products.
/// Requires every coordinate of the target to be at most that of the base;
/// lambda defaults to the box of the target.
WallCrossingPlan wall_crossing_sequence(const AlcoveGeometry& g, const Alcove& target,
                                        std::optional<Weight> lambda = std::nullopt);
bool plan_is_valid(const AlcoveGeometry& g, const WallCrossingPlan& plan);

struct ProjectiveOptions {
  std::optional<Weight> lambda;
  bool trace = false;
};

struct ProjectiveReport {
  Alcove alcove;
  WallCrossingPlan plan;
  long shift = 0;            // length of the alcove relative to lambda
  VermaTable table;          // of the chosen summand
  VermaTable normalized;     // table times v^shift
  int endomorphism_dim = 0;  // degree-0 endomorphisms of the summand
  bool local = false;
  int hom_to_standard = 0;   // degree-0 maps to the shifted standard object
  bool epi = false;
  int window_radius = 0;     // smallest box radius around the base containing the support
  std::vector<std::string> decomposition;
  std::vector<std::pair<Wall, VermaTable>> steps;
};

template <class K>
struct Projective {
  Sheaf<K> sheaf;
  ProjectiveReport report;
};

template <class K>
Projective<K> build_projective(const AlcoveGeometry& g, const Alcove& a, const ProjectiveOptions& options = {});

std::string to_json(const AlcoveGeometry& g, const ProjectiveReport& r);

/// Splits M into indecomposable summands through idempotents of its
/// degree-0 endomorphisms. Throws when an idempotent cannot be split over
/// the field.
template <class K>
std::vector<Sheaf<K>> decompose(const AlcoveGeometry& g, const Sheaf<K>& m, std::vector<std::string>* trace = nullptr);

/// Whether the degree-0 endomorphism algebra is local with residue field K.
template <class K>
bool has_local_endomorphisms(const AlcoveGeometry& g, const Sheaf<K>& m);

/// A map l: B -> M with p l = h, for p: M -> N and h: B -> N.
template <class K>
std::optional<Morphism<K>> lift(const AlcoveGeometry& g, const Sheaf<K>& b, const Sheaf<K>& m, const Sheaf<K>& n,
                                const Morphism<K>& p, const Morphism<K>& h);

}  // namespace alcsheaf
