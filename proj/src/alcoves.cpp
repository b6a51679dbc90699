#include "alcsheaf/alcoves.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace alcsheaf {

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::size_t hash_vec(std::size_t seed, const IVec& v) {
  for (long x : v) seed = seed * 1000003u ^ std::hash<long>{}(x);
  return seed;
}

// Solves m x = e_i over Q for every i; returns columns.
std::vector<std::vector<mpq_class>> inverse_columns(const IMat& m) {
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(2 * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (a[p][c] == 0) ++p;
    std::swap(a[p], a[c]);
    mpq_class inv = 1 / a[c][c];
    for (auto& x : a[c]) x *= inv;
    for (int r = 0; r < n; ++r)
      if (r != c && a[r][c] != 0) {
        mpq_class f = a[r][c];
        for (int k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
      }
  }
  std::vector<std::vector<mpq_class>> cols(n, std::vector<mpq_class>(n));
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r) cols[i][r] = a[r][n + i];
  return cols;
}

}  // namespace

std::size_t AlcoveHash::operator()(const Alcove& a) const noexcept {
  return hash_vec(static_cast<std::size_t>(a.w), a.t);
}

std::size_t AlcoveGeometry::PairHash::operator()(const PairKey& k) const noexcept {
  return hash_vec(static_cast<std::size_t>(k.wa * 131 + k.wb), k.diff);
}

std::string to_string(Order o) {
  switch (o) {
    case Order::less: return "less";
    case Order::equal: return "equal";
    case Order::greater: return "greater";
    default: return "incomparable";
  }
}

AlcoveGeometry::AlcoveGeometry(RootSystem rs) : rs_(std::move(rs)) {
  const int n = rs_.rank();
  IMat transposed(n, IVec(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) transposed[j][k] = rs_.pairing()[k][j];
  auto omega = inverse_columns(transposed);
  const IVec& m = rs_.highest_coroot();
  std::vector<mpq_class> pe(n, 0);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r) pe[r] += omega[i][r] / (m[i] * (n + 1));
  mpz_class den = 1;
  for (int r = 0; r < n; ++r) {
    pe[r].canonicalize();
    den = lcm(den, mpz_class(pe[r].get_den()));
    for (int i = 0; i < n; ++i) {
      omega[i][r].canonicalize();
      den = lcm(den, mpz_class(omega[i][r].get_den()));
    }
  }
  scale_ = den.get_si();
  pe_.resize(n);
  for (int r = 0; r < n; ++r) pe_[r] = mpq_class(pe[r] * scale_).get_num().get_si();
  weights_scaled_.assign(n, IVec(n));
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      weights_scaled_[i][r] = mpq_class(omega[i][r] * scale_).get_num().get_si();
}

IVec AlcoveGeometry::bary(const Alcove& a) const {
  IVec b = rs_.act(a.w, pe_);
  for (int r = 0; r < rank(); ++r) b[r] += scale_ * a.t[r];
  return b;
}

Alcove AlcoveGeometry::from_bary(const IVec& scaled) const {
  for (int w = 0; w < rs_.order(); ++w) {
    IVec d = rs_.act(w, pe_);
    bool ok = true;
    for (int r = 0; r < rank() && ok; ++r) {
      d[r] = scaled[r] - d[r];
      ok = d[r] % scale_ == 0;
    }
    if (!ok) continue;
    for (auto& x : d) x /= scale_;
    return {w, d};
  }
  throw std::invalid_argument("point is not the barycenter of an alcove");
}

IVec AlcoveGeometry::coords(const Alcove& a) const {
  IVec b = bary(a);
  IVec k(rs_.num_positive());
  for (int r = 0; r < rs_.num_positive(); ++r) k[r] = floor_div(rs_.pair(b, r), scale_);
  return k;
}

Alcove AlcoveGeometry::from_coords(const IVec& k) const {
  if (static_cast<int>(k.size()) != rs_.num_positive())
    throw std::invalid_argument("expected one coordinate per positive root");
  for (int w = 0; w < rs_.order(); ++w) {
    IVec base = coords({w, IVec(rank(), 0)});
    IVec ts(rank(), 0);
    for (int i = 0; i < rank(); ++i) {
      long diff = k[rs_.simple(i)] - base[rs_.simple(i)];
      for (int r = 0; r < rank(); ++r) ts[r] += diff * weights_scaled_[i][r];
    }
    if (std::any_of(ts.begin(), ts.end(), [&](long x) { return x % scale_ != 0; })) continue;
    for (auto& x : ts) x /= scale_;
    Alcove a{w, ts};
    if (coords(a) == k) return a;
  }
  throw std::invalid_argument("coordinates do not describe an alcove");
}

Alcove AlcoveGeometry::reflect(const Alcove& a, int root, long n) const {
  int s = rs_.reflection(root);
  IVec t = rs_.act(s, a.t);
  for (int r = 0; r < rank(); ++r) t[r] += n * rs_.root(root)[r];
  return {rs_.mul(s, a.w), t};
}

Alcove AlcoveGeometry::translate(const Alcove& a, const IVec& v) const {
  Alcove b = a;
  for (int r = 0; r < rank(); ++r) b.t[r] += v[r];
  return b;
}

Alcove AlcoveGeometry::right_act(const Alcove& a, Wall s) const {
  if (s < 0 || s > rank()) throw std::out_of_range("wall index out of range");
  if (s > 0) return {rs_.mul(a.w, rs_.simple_reflection(s - 1)), a.t};
  int theta = rs_.highest_coroot_root();
  IVec shift = rs_.act(a.w, rs_.root(theta));
  Alcove b{rs_.mul(a.w, rs_.reflection(theta)), a.t};
  for (int r = 0; r < rank(); ++r) b.t[r] += shift[r];
  return b;
}

int AlcoveGeometry::orbit_right_act(int w, Wall s) const {
  if (s > 0) return rs_.mul(w, rs_.simple_reflection(s - 1));
  return rs_.mul(w, rs_.reflection(rs_.highest_coroot_root()));
}

Alcove AlcoveGeometry::alpha_up(const Alcove& a, int root) const {
  long k = floor_div(rs_.pair(bary(a), root), scale_);
  return reflect(a, root, k + 1);
}

Alcove AlcoveGeometry::alpha_down(const Alcove& a, int root) const {
  long k = floor_div(rs_.pair(bary(a), root), scale_);
  return reflect(a, root, k);
}

bool AlcoveGeometry::in_cone(const IVec& lo, const IVec& hi) const {
  for (int r = 0; r < rank(); ++r)
    if (hi[r] < lo[r]) return false;
  return true;
}

bool AlcoveGeometry::reach_up(const Alcove& a, const Alcove& b) const {
  const IVec target = bary(b);
  std::unordered_set<Alcove, AlcoveHash> seen{a};
  std::deque<Alcove> queue{a};
  while (!queue.empty()) {
    Alcove c = std::move(queue.front());
    queue.pop_front();
    for (int r = 0; r < rs_.num_positive(); ++r) {
      Alcove d = alpha_up(c, r);
      if (d == b) return true;
      if (!in_cone(bary(d), target) || seen.count(d)) continue;
      seen.insert(d);
      queue.push_back(std::move(d));
    }
  }
  return false;
}

bool AlcoveGeometry::leq(const Alcove& a, const Alcove& b) const {
  if (a == b) return true;
  if (!in_cone(bary(a), bary(b))) return false;
  PairKey key{a.w, b.w, b.t};
  for (int r = 0; r < rank(); ++r) key.diff[r] -= a.t[r];
  {
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  bool result = reach_up(a, b);
  std::lock_guard lock(cache_mutex_);
  cache_.emplace(std::move(key), result);
  return result;
}

Order AlcoveGeometry::compare(const Alcove& a, const Alcove& b) const {
  if (a == b) return Order::equal;
  if (leq(a, b)) return Order::less;
  if (leq(b, a)) return Order::greater;
  return Order::incomparable;
}

std::vector<Alcove> AlcoveGeometry::interval(const Alcove& a, const Alcove& b) const {
  if (!leq(a, b)) throw std::invalid_argument("interval requires a <= b");
  const IVec lo = bary(a), hi = bary(b);
  auto sweep = [&](const Alcove& start, bool up) {
    std::set<Alcove> seen{start};
    std::deque<Alcove> queue{start};
    while (!queue.empty()) {
      Alcove c = queue.front();
      queue.pop_front();
      for (int r = 0; r < rs_.num_positive(); ++r) {
        Alcove d = up ? alpha_up(c, r) : alpha_down(c, r);
        IVec bd = bary(d);
        if (!in_cone(lo, bd) || !in_cone(bd, hi) || seen.count(d)) continue;
        seen.insert(d);
        queue.push_back(d);
      }
    }
    return seen;
  };
  auto above = sweep(a, true), below = sweep(b, false);
  std::vector<Alcove> out;
  std::set_intersection(above.begin(), above.end(), below.begin(), below.end(),
                        std::back_inserter(out));
  return out;
}

Weight AlcoveGeometry::box_of(const Alcove& a) const {
  IVec k = coords(a);
  Weight lambda(rank());
  for (int i = 0; i < rank(); ++i) lambda[i] = k[rs_.simple(i)] + 1;
  return lambda;
}

IVec AlcoveGeometry::weight_scaled(const Weight& lambda) const {
  if (static_cast<int>(lambda.size()) != rank())
    throw std::invalid_argument("weight has wrong number of coordinates");
  IVec x(rank(), 0);
  for (int i = 0; i < rank(); ++i)
    for (int r = 0; r < rank(); ++r) x[r] += lambda[i] * weights_scaled_[i][r];
  return x;
}

IVec AlcoveGeometry::weight_to_roots(const Weight& lambda) const {
  IVec x = weight_scaled(lambda);
  for (auto& v : x) {
    if (v % scale_ != 0) throw std::invalid_argument("weight is not in the root lattice");
    v /= scale_;
  }
  return x;
}

Alcove AlcoveGeometry::tau(const Weight& lambda, int x) const {
  IVec b = weight_scaled(lambda);
  IVec p = rs_.act(rs_.mul(x, rs_.longest()), pe_);
  for (int r = 0; r < rank(); ++r) b[r] += p[r];
  return from_bary(b);
}

Alcove AlcoveGeometry::special_minus(const Weight& lambda) const { return tau(lambda, 0); }

Alcove AlcoveGeometry::special_plus(const Weight& lambda) const {
  IVec b = weight_scaled(lambda);
  for (int r = 0; r < rank(); ++r) b[r] += pe_[r];
  return from_bary(b);
}

std::vector<Alcove> AlcoveGeometry::special_section(const Weight& lambda) const {
  std::vector<Alcove> out;
  for (int x = 0; x < rs_.order(); ++x) out.push_back(tau(lambda, x));
  return out;
}

std::vector<Alcove> AlcoveGeometry::box(const Weight& lambda) const {
  Alcove start = special_minus(lambda);
  std::set<Alcove> seen{start};
  std::deque<Alcove> queue{start};
  while (!queue.empty()) {
    Alcove c = queue.front();
    queue.pop_front();
    for (Wall s = 0; s < num_walls(); ++s) {
      Alcove d = right_act(c, s);
      if (box_of(d) != lambda || seen.count(d)) continue;
      seen.insert(d);
      queue.push_back(d);
    }
  }
  return {seen.begin(), seen.end()};
}

long AlcoveGeometry::length(const Weight& lambda, const Alcove& a) const {
  IVec k = coords(a);
  long l = 0;
  for (int r = 0; r < rs_.num_positive(); ++r) {
    long pairing = 0;
    for (int i = 0; i < rank(); ++i) pairing += lambda[i] * rs_.coroot(r)[i];
    l -= k[r] - pairing;
  }
  return l;
}

bool AlcoveGeometry::is_s_dominant(const Alcove& a, Wall s) const {
  return leq(right_act(a, s), a);
}

std::vector<Alcove> AlcoveGeometry::alpha_string(const Alcove& a, int root, int radius) const {
  std::vector<Alcove> below, above;
  Alcove c = a;
  for (int i = 0; i < radius; ++i) below.push_back(c = alpha_down(c, root));
  c = a;
  for (int i = 0; i < radius; ++i) above.push_back(c = alpha_up(c, root));
  std::vector<Alcove> out(below.rbegin(), below.rend());
  out.push_back(a);
  out.insert(out.end(), above.begin(), above.end());
  return out;
}

std::string AlcoveGeometry::format(const Alcove& a) const {
  std::ostringstream os;
  os << "w=";
  const auto& word = rs_.word(a.w);
  if (word.empty()) os << 'e';
  for (int i : word) os << (i + 1);
  os << ";t=";
  for (int r = 0; r < rank(); ++r) os << (r ? "," : "") << a.t[r];
  return os.str();
}

std::string AlcoveGeometry::format_coords(const Alcove& a) const {
  std::ostringstream os;
  os << "k=";
  IVec k = coords(a);
  for (std::size_t r = 0; r < k.size(); ++r) os << (r ? "," : "") << k[r];
  return os.str();
}

namespace {

IVec parse_list(const std::string& s) {
  IVec out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = std::stol(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad integer list: " + s);
    out.push_back(v);
  }
  return out;
}

}  // namespace

Alcove AlcoveGeometry::parse(const std::string& text) const {
  try {
    if (text.rfind("w=", 0) == 0) {
      auto semi = text.find(";t=");
      if (semi == std::string::npos) throw std::invalid_argument("missing ;t=");
      std::string word = text.substr(2, semi - 2);
      int w = rs_.identity();
      if (word != "e" && !word.empty()) {
        for (char ch : word) {
          int i = ch - '1';
          if (i < 0 || i >= rank()) throw std::invalid_argument("bad reflection index");
          w = rs_.mul(w, rs_.simple_reflection(i));
        }
      }
      IVec t = parse_list(text.substr(semi + 3));
      if (static_cast<int>(t.size()) != rank()) throw std::invalid_argument("bad translation");
      return {w, t};
    }
    std::string body = text.rfind("k=", 0) == 0 ? text.substr(2) : text;
    return from_coords(parse_list(body));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("cannot parse alcove '" + text + "': " + e.what());
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("cannot parse alcove '" + text + "'");
  }
}

// ---------------------------------------------------------------------------

std::optional<int> Window::index(const Alcove& a) const {
  auto it = index_.find(a);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Window Window::around(const AlcoveGeometry& g, const Alcove& center, int radius) {
  Window win;
  win.g_ = &g;
  const int n = g.rank();
  const long sc = g.scale();
  IVec c = g.bary(center);
  for (int w = 0; w < g.roots().order(); ++w) {
    IVec base = g.bary({w, IVec(n, 0)});
    IVec lo(n), hi(n);
    for (int r = 0; r < n; ++r) {
      lo[r] = -floor_div(-(c[r] - radius * sc - base[r]), sc);
      hi[r] = floor_div(c[r] + radius * sc - base[r], sc);
    }
    bool empty = false;
    for (int r = 0; r < n; ++r) empty = empty || lo[r] > hi[r];
    if (empty) continue;
    IVec t = lo;
    while (true) {
      win.alcoves_.push_back({w, t});
      int r = 0;
      while (r < n && ++t[r] > hi[r]) t[r] = lo[r], ++r;
      if (r == n) break;
    }
  }
  std::sort(win.alcoves_.begin(), win.alcoves_.end(), [&](const Alcove& a, const Alcove& b) {
    IVec ba = g.bary(a), bb = g.bary(b);
    long ha = std::accumulate(ba.begin(), ba.end(), 0L), hb = std::accumulate(bb.begin(), bb.end(), 0L);
    return ha != hb ? ha < hb : a < b;
  });
  for (int i = 0; i < win.size(); ++i) win.index_[win.alcoves_[i]] = i;
  // A box in root coordinates is interval-closed, so the order is the
  // reflexive-transitive closure of the generating relations inside it.
  const int m = win.size();
  win.leq_.assign(m * m, false);
  for (int i = 0; i < m; ++i) {
    std::deque<int> queue{i};
    win.leq_[i * m + i] = true;
    while (!queue.empty()) {
      int c = queue.front();
      queue.pop_front();
      for (int r = 0; r < g.roots().num_positive(); ++r) {
        auto d = win.index(g.alpha_up(win.alcoves_[c], r));
        if (!d || win.leq_[i * m + *d]) continue;
        win.leq_[i * m + *d] = true;
        queue.push_back(*d);
      }
    }
  }
  win.interval_closed_ = true;
  return win;
}

Window Window::of(const AlcoveGeometry& g, std::vector<Alcove> alcoves) {
  Window win;
  win.g_ = &g;
  std::sort(alcoves.begin(), alcoves.end());
  alcoves.erase(std::unique(alcoves.begin(), alcoves.end()), alcoves.end());
  win.alcoves_ = std::move(alcoves);
  for (int i = 0; i < win.size(); ++i) win.index_[win.alcoves_[i]] = i;
  const int m = win.size();
  win.leq_.assign(m * m, false);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) win.leq_[i * m + j] = g.leq(win.alcoves_[i], win.alcoves_[j]);
  win.interval_closed_ = true;
  for (int i = 0; i < m && win.interval_closed_; ++i)
    for (int j = 0; j < m && win.interval_closed_; ++j)
      if (i != j && win.leq(i, j))
        for (const auto& c : g.interval(win.alcoves_[i], win.alcoves_[j]))
          if (!win.contains(c)) {
            win.interval_closed_ = false;
            break;
          }
  return win;
}

bool Window::s_closed(Wall s) const {
  return std::all_of(alcoves_.begin(), alcoves_.end(),
                     [&](const Alcove& a) { return contains(g_->right_act(a, s)); });
}

Window::Subset Window::down_closure(const Subset& x) const {
  Subset out(size(), false);
  for (int i = 0; i < size(); ++i)
    if (x[i])
      for (int j = 0; j < size(); ++j)
        if (leq(j, i)) out[j] = true;
  return out;
}

Window::Subset Window::principal_ideal(int i) const {
  Subset x(size(), false);
  x[i] = true;
  return down_closure(x);
}

bool Window::is_down_closed(const Subset& x) const { return down_closure(x) == x; }

std::vector<Window::Subset> Window::ideals(std::size_t limit) const {
  std::vector<int> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> below(size(), 0);
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) below[i] += leq(j, i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return below[a] < below[b]; });
  std::vector<Subset> out;
  Subset cur(size(), false);
  std::function<void(int)> rec = [&](int k) {
    if (k == size()) {
      if (out.size() >= limit) throw std::length_error("too many down-closed subsets");
      out.push_back(cur);
      return;
    }
    int e = order[k];
    rec(k + 1);
    bool ok = true;
    for (int j = 0; j < size() && ok; ++j)
      if (j != e && leq(j, e) && !cur[j]) ok = false;
    if (ok) {
      cur[e] = true;
      rec(k + 1);
      cur[e] = false;
    }
  };
  rec(0);
  return out;
}

Window::Subset Window::right_act(const Subset& j, Wall s) const {
  Subset out(size(), false);
  for (int i = 0; i < size(); ++i)
    if (j[i]) {
      auto k = index(g_->right_act(alcoves_[i], s));
      if (!k) throw std::invalid_argument("window not s-closed");
      out[*k] = true;
    }
  return out;
}

std::pair<Window::Subset, Window::Subset> Window::flat_sharp(const Subset& j, Wall s) const {
  Subset js = right_act(j, s);
  Subset flat(size()), sharp(size());
  for (int i = 0; i < size(); ++i) {
    flat[i] = j[i] && js[i];
    sharp[i] = j[i] || js[i];
  }
  return {flat, sharp};
}

std::vector<std::pair<int, int>> Window::covers() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) {
      if (i == j || !leq(i, j)) continue;
      bool cover = true;
      for (int k = 0; k < size() && cover; ++k)
        if (k != i && k != j && leq(i, k) && leq(k, j)) cover = false;
      if (cover) out.emplace_back(i, j);
    }
  return out;
}

std::string Window::dump_json() const {
  nlohmann::ordered_json j;
  j["type"] = g_->roots().label();
  j["interval_closed"] = interval_closed_;
  auto& nodes = j["alcoves"] = nlohmann::ordered_json::array();
  for (const auto& a : alcoves_)
    nodes.push_back({{"id", g_->format(a)}, {"coords", g_->format_coords(a)}});
  auto& edges = j["covers"] = nlohmann::ordered_json::array();
  for (auto [a, b] : covers()) edges.push_back({a, b});
  return j.dump(2);
}

}  // namespace alcsheaf
