#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "alcsheaf/rootsys.hpp"

namespace alcsheaf {

/// The alcove t_t(w(A_e)): a finite Weyl group element and a root-lattice
/// translation (simple-root coordinates).
struct Alcove {
  int w = 0;
  IVec t;
  auto operator<=>(const Alcove&) const = default;
};

struct AlcoveHash {
  std::size_t operator()(const Alcove& a) const noexcept;
};

enum class Order { less, equal, greater, incomparable };
std::string to_string(Order o);

/// Index into the simple affine reflections: 0 is the affine wall
/// (s_{theta,1}), i >= 1 is the finite simple reflection s_i.
using Wall = int;

/// A weight in fundamental-weight coordinates.
using Weight = IVec;

class AlcoveGeometry {
 public:
  explicit AlcoveGeometry(RootSystem rs);

  const RootSystem& roots() const { return rs_; }
  int rank() const { return rs_.rank(); }
  int num_walls() const { return rs_.rank() + 1; }

  Alcove fundamental() const { return {0, IVec(rank(), 0)}; }

  /// Barycenter scaled by scale(), in simple-root coordinates.
  IVec bary(const Alcove& a) const;
  long scale() const { return scale_; }
  Alcove from_bary(const IVec& scaled) const;

  /// floor(<bary, a^v>) for every positive root a.
  IVec coords(const Alcove& a) const;
  Alcove from_coords(const IVec& k) const;

  Alcove reflect(const Alcove& a, int root, long n) const;
  Alcove translate(const Alcove& a, const IVec& root_lattice_vector) const;
  Alcove right_act(const Alcove& a, Wall s) const;
  /// The element of W_0 by which the ZR-orbit of `a` is identified.
  int orbit(const Alcove& a) const { return a.w; }
  int orbit_right_act(int w, Wall s) const;

  Alcove alpha_up(const Alcove& a, int root) const;
  Alcove alpha_down(const Alcove& a, int root) const;

  Order compare(const Alcove& a, const Alcove& b) const;
  bool leq(const Alcove& a, const Alcove& b) const;
  bool less(const Alcove& a, const Alcove& b) const { return a != b && leq(a, b); }
  std::vector<Alcove> interval(const Alcove& a, const Alcove& b) const;

  Weight box_of(const Alcove& a) const;
  Alcove special_minus(const Weight& lambda) const;
  Alcove special_plus(const Weight& lambda) const;
  std::vector<Alcove> special_section(const Weight& lambda) const;
  /// tau(x) = lambda + x w_0 (A_e) for x in W_0.
  Alcove tau(const Weight& lambda, int x) const;
  /// All alcoves of the box containing A_lambda^-.
  std::vector<Alcove> box(const Weight& lambda) const;
  long length(const Weight& lambda, const Alcove& a) const;

  bool is_s_dominant(const Alcove& a, Wall s) const;
  std::vector<Alcove> alpha_string(const Alcove& a, int root, int radius) const;

  /// Root-lattice coordinates of a weight that lies in ZR; throws otherwise.
  IVec weight_to_roots(const Weight& lambda) const;
  /// Scaled simple-root coordinates of any weight.
  IVec weight_scaled(const Weight& lambda) const;

  std::string format(const Alcove& a) const;
  std::string format_coords(const Alcove& a) const;
  Alcove parse(const std::string& text) const;

 private:
  struct PairKey {
    int wa, wb;
    IVec diff;
    bool operator==(const PairKey&) const = default;
  };
  struct PairHash {
    std::size_t operator()(const PairKey& k) const noexcept;
  };
  bool in_cone(const IVec& lo, const IVec& hi) const;
  bool reach_up(const Alcove& a, const Alcove& b) const;

  RootSystem rs_;
  long scale_ = 1;
  IVec pe_;
  IMat weights_scaled_;  // scaled root coordinates of fundamental weights
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<PairKey, bool, PairHash> cache_;
};

/// A finite set of alcoves with its order relation and closure flags.
class Window {
 public:
  /// All alcoves whose scaled barycenter lies in the box [center - r, center + r]
  /// (simple-root coordinates, radius in units of the root lattice).
  static Window around(const AlcoveGeometry& g, const Alcove& center, int radius);
  /// Arbitrary finite set; the order is computed pairwise.
  static Window of(const AlcoveGeometry& g, std::vector<Alcove> alcoves);

  const AlcoveGeometry& geometry() const { return *g_; }
  int size() const { return static_cast<int>(alcoves_.size()); }
  const std::vector<Alcove>& alcoves() const { return alcoves_; }
  const Alcove& operator[](int i) const { return alcoves_[i]; }
  std::optional<int> index(const Alcove& a) const;
  bool contains(const Alcove& a) const { return index(a).has_value(); }
  bool leq(int i, int j) const { return leq_[i * size() + j]; }

  bool interval_closed() const { return interval_closed_; }
  bool s_closed(Wall s) const;

  using Subset = std::vector<bool>;
  Subset down_closure(const Subset& x) const;
  Subset principal_ideal(int i) const;
  bool is_down_closed(const Subset& x) const;
  /// Every down-closed subset; only sensible for small windows.
  std::vector<Subset> ideals(std::size_t limit = 1u << 16) const;
  /// (J intersect Js, J union Js). Throws if the window is not s-closed on J.
  std::pair<Subset, Subset> flat_sharp(const Subset& j, Wall s) const;
  Subset right_act(const Subset& j, Wall s) const;

  std::vector<std::pair<int, int>> covers() const;
  std::string dump_json() const;

 private:
  const AlcoveGeometry* g_ = nullptr;
  std::vector<Alcove> alcoves_;
  std::map<Alcove, int> index_;
  std::vector<bool> leq_;
  bool interval_closed_ = false;
};

}  // namespace alcsheaf
