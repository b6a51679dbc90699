#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alcsheaf/field.hpp"

namespace alcsheaf {

/// Laurent polynomial in v; a free summand S[l] contributes v^{-l}.
class RankSeries {
 public:
  RankSeries() = default;
  static RankSeries monomial(int exponent, long coefficient = 1);
  static RankSeries parse(const std::string& text);

  RankSeries operator+(const RankSeries& o) const;
  RankSeries operator-(const RankSeries& o) const;
  RankSeries operator*(const RankSeries& o) const;
  RankSeries& operator+=(const RankSeries& o) { return *this = *this + o; }
  /// Multiplication by v^l.
  RankSeries shifted(int l) const;
  long coefficient(int exponent) const;
  long total() const;
  bool is_zero() const { return terms_.empty(); }
  bool nonnegative() const;
  bool operator==(const RankSeries&) const = default;
  std::string str() const;
  const std::map<int, long>& terms() const { return terms_; }

 private:
  std::map<int, long> terms_;
};

constexpr int kMaxVars = 3;
using Exponents = std::array<int, kMaxVars>;

int total_exponent(const Exponents& e);
int monomial_count(int nvars, int total);
int monomial_index(int nvars, const Exponents& e);
const std::vector<Exponents>& monomials(int nvars, int total);

/// Sparse polynomial in at most three variables (each of degree 2).
template <class K>
class Poly {
 public:
  using Term = std::pair<Exponents, K>;
  Poly() = default;
  Poly(const K& c);
  static Poly monomial(const Exponents& e, const K& c = K(1));
  static Poly linear_form(std::span<const long> coefficients);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// 2 * total exponent of the leading term; -1 for zero. Homogeneous use only.
  int degree() const;
  bool is_homogeneous() const;
  K coefficient(const Exponents& e) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly scaled(const K& c) const;
  Poly times(const Exponents& e) const;
  Poly pow(int k) const;
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  std::string str() const;

 private:
  void normalize();
  std::vector<Term> terms_;
};

/// Homogeneous element of a graded free module: one polynomial per coordinate.
template <class K>
struct Element {
  int degree = 0;
  std::vector<Poly<K>> coords;

  bool is_zero() const;
  Element operator+(const Element& o) const;
  Element operator-(const Element& o) const;
  Element operator-() const;
  Element scaled(const Poly<K>& p) const;
  bool operator==(const Element& o) const { return degree == o.degree && coords == o.coords; }
};

/// Column layout of the degree-n slice of a graded free module. Only the
/// listed coordinates are included, in the given order.
struct SliceLayout {
  SliceLayout(int nvars, std::span<const int> ambient, int degree,
              const std::vector<int>* coordinate_order = nullptr);
  int nvars;
  int degree;
  std::vector<int> offset;  // -1 when a coordinate does not contribute
  std::vector<int> exps;
  int size = 0;
};

template <class K>
std::vector<K> to_dense(const Element<K>& x, const SliceLayout& layout);
template <class K>
Element<K> from_dense(std::span<const K> v, const SliceLayout& layout, std::size_t ncoords);

/// Incremental row echelon form. Rows are kept with normalized pivots and
/// sorted by pivot column.
template <class K>
class Echelon {
 public:
  struct Row {
    std::vector<K> v;
    std::vector<K> combo;
  };
  explicit Echelon(int ncols, bool track = false) : ncols_(ncols), track_(track) {}
  /// Reduces v; returns the pivot of the remainder or -1 when it vanishes.
  int reduce(std::vector<K>& v, std::vector<K>* combo = nullptr) const;
  /// Inserts v; returns true when it was independent of the rows so far.
  bool insert(std::vector<K> v);
  int rank() const { return static_cast<int>(rows_.size()); }
  int inserted() const { return inserted_; }
  int ncols() const { return ncols_; }
  const std::map<int, Row>& rows() const { return rows_; }
  /// With tracking: combinations of inserted vectors that vanish.
  const std::vector<std::vector<K>>& dependencies() const { return deps_; }

 private:
  int ncols_;
  bool track_;
  int inserted_ = 0;
  std::map<int, Row> rows_;
  std::vector<std::vector<K>> deps_;
};

/// Null space of a dense matrix (rows x cols) as a list of column vectors.
template <class K>
std::vector<std::vector<K>> nullspace(const std::vector<std::vector<K>>& rows, int ncols);

/// A graded map between free modules: column j is the image of the j-th
/// source generator (degree col_degrees[j]) in the target with coordinate
/// degrees row_degrees.
template <class K>
struct GradedMatrix {
  int nvars = 1;
  std::vector<int> row_degrees;
  std::vector<int> col_degrees;
  std::vector<Element<K>> columns;
  bool homogeneous() const;
};

/// A graded submodule of a free module, given by homogeneous generators.
template <class K>
class Submodule {
 public:
  Submodule() = default;
  Submodule(int nvars, std::vector<int> ambient, std::vector<Element<K>> generators = {});

  int nvars() const { return nvars_; }
  const std::vector<int>& ambient() const { return ambient_; }
  int ncoords() const { return static_cast<int>(ambient_.size()); }
  const std::vector<Element<K>>& generators() const { return gens_; }
  bool is_zero() const { return gens_.empty(); }
  int min_generator_degree() const;
  int max_generator_degree() const;
  int min_ambient_degree() const;

  /// Echelon basis of the degree-n slice in the given layout.
  Echelon<K> slice(const SliceLayout& layout) const;
  Echelon<K> slice(int n) const;
  int dim(int n) const { return slice(n).rank(); }
  bool contains(const Element<K>& x) const;

  /// A minimal homogeneous generating set, in increasing degree.
  Submodule minimal() const;
  /// A basis if the module is graded free (minimal generators of full generic rank).
  std::optional<std::vector<Element<K>>> free_basis() const;
  RankSeries rank_series() const;

  Submodule project(const std::vector<int>& keep) const;
  /// Generators in degrees <= cap of the intersection with the coordinates
  /// flagged in `allowed`.
  Submodule restrict_to(const std::vector<bool>& allowed, int cap) const;
  Submodule shifted(int l) const;
  GradedMatrix<K> presentation() const;

 private:
  int nvars_ = 1;
  std::vector<int> ambient_;
  std::vector<Element<K>> gens_;
};

/// Degree-d slice of a presented module, as field vectors in its layout.
template <class K>
std::vector<std::vector<K>> degree_slice(const Submodule<K>& m, int d);

/// Kernel of f, generated in degrees <= cap.
template <class K>
Submodule<K> graded_kernel(const GradedMatrix<K>& f, int cap);

template <class K>
Submodule<K> module_sum(const Submodule<K>& m, const Submodule<K>& n);

/// Intersection, generated in degrees <= cap.
template <class K>
Submodule<K> module_intersection(const Submodule<K>& m, const Submodule<K>& n, int cap);

template <class K>
RankSeries rank_series(const Submodule<K>& m) {
  return m.rank_series();
}

/// Rank over the fraction field of S of the given elements, certified by
/// evaluation (random points, in an extension field for positive
/// characteristic). A full-rank answer is exact; a deficient answer is
/// exact with overwhelming probability.
template <class K>
int generic_rank(const std::vector<Element<K>>& elements, int nvars, int ncoords);

/// Coefficients of x in terms of a free basis; nullopt when x is not in the span.
template <class K>
std::optional<std::vector<Poly<K>>> basis_coefficients(const std::vector<Element<K>>& basis,
                                                      const std::vector<int>& ambient, int nvars,
                                                      const Element<K>& x);

}  // namespace alcsheaf
