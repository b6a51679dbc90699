#pragma once

#include <span>
#include <string>
#include <vector>

namespace alcsheaf {

using IVec = std::vector<long>;
using IMat = std::vector<IVec>;

/// A finite crystallographic root system of rank at most 3 together with its
/// Weyl group. Weights and roots are stored in simple-root coordinates;
/// coroots are stored both in simple-coroot and in fundamental-coweight
/// coordinates. The latter vector doubles as the linear form x -> <x, a^v>.
class RootSystem {
 public:
  RootSystem(char type, int rank);

  std::string label() const;
  char type() const { return type_; }
  int rank() const { return rank_; }

  int num_positive() const { return static_cast<int>(positive_.size()); }
  const IVec& root(int a) const { return positive_[a]; }
  const std::vector<IVec>& positive_roots() const { return positive_; }
  /// Index of the i-th simple root in the positive root list.
  int simple(int i) const { return simple_[i]; }
  const IVec& coroot(int a) const { return coroot_simple_[a]; }
  /// Coweight coordinates of a^v, i.e. the values <a_i, a^v>.
  const IVec& coroot_form(int a) const { return coroot_form_[a]; }
  /// pairing()[i][j] = <a_i, a_j^v>.
  const IMat& pairing() const { return pairing_; }
  /// Index of the root whose coroot is the highest coroot.
  int highest_coroot_root() const { return theta_; }
  /// Coefficients of the highest coroot in simple coroots.
  const IVec& highest_coroot() const { return coroot_simple_[theta_]; }

  long pair(std::span<const long> x, int a) const;
  /// Index of a positive root equal to +-v, or -1.
  int find_root(std::span<const long> v, int* sign = nullptr) const;

  // Weyl group
  int order() const { return static_cast<int>(weyl_.size()); }
  const IMat& matrix(int w) const { return weyl_[w]; }
  const std::vector<int>& word(int w) const { return words_[w]; }
  int length(int w) const { return static_cast<int>(words_[w].size()); }
  int mul(int x, int y) const { return mult_[x * order() + y]; }
  int inv(int w) const { return inverse_[w]; }
  int identity() const { return 0; }
  int simple_reflection(int i) const { return simple_refl_[i]; }
  int reflection(int a) const { return reflection_[a]; }
  int longest() const { return longest_; }
  IVec act(int w, std::span<const long> x) const;
  int find_element(const IMat& m) const;
  std::vector<const IMat*> weyl_matrices() const;

 private:
  char type_;
  int rank_;
  IMat gram_;
  IMat pairing_;
  std::vector<IVec> positive_;
  std::vector<int> simple_;
  std::vector<IVec> coroot_simple_;
  std::vector<IVec> coroot_form_;
  int theta_ = 0;
  std::vector<IMat> weyl_;
  std::vector<std::vector<int>> words_;
  std::vector<int> mult_;
  std::vector<int> inverse_;
  std::vector<int> simple_refl_;
  std::vector<int> reflection_;
  int longest_ = 0;
};

/// Parses "A2", "B3" and similar.
RootSystem make_root_system(const std::string& label);

/// The GKM condition on coroots in the coweight lattice tensored with the
/// field of the given characteristic (0 for the rationals).
bool gkm_check(const RootSystem& rs, int characteristic);

/// An affine transformation x -> Mx + b of the root lattice tensor Q,
/// written in simple-root coordinates. Translations are by root-lattice
/// vectors, so b is integral.
struct AffineMap {
  IMat linear;
  IVec shift;

  static AffineMap identity(int rank);
  static AffineMap translation(const IVec& v);
  AffineMap compose(const AffineMap& inner) const;
  IVec apply(std::span<const long> x, long scale = 1) const;
  bool operator==(const AffineMap&) const = default;
};

/// The reflection in the hyperplane {<x, a^v> = n}.
AffineMap affine_reflection(const RootSystem& rs, int root, long n);

IMat mat_mul(const IMat& a, const IMat& b);

}  // namespace alcsheaf
