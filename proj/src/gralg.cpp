#include "alcsheaf/gralg.hpp"

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

namespace alcsheaf {

// ---------------------------------------------------------------------------
// RankSeries

RankSeries RankSeries::monomial(int exponent, long coefficient) {
  RankSeries r;
  if (coefficient != 0) r.terms_[exponent] = coefficient;
  return r;
}

RankSeries RankSeries::operator+(const RankSeries& o) const {
  RankSeries r = *this;
  for (auto [e, c] : o.terms_)
    if ((r.terms_[e] += c) == 0) r.terms_.erase(e);
  return r;
}

RankSeries RankSeries::operator-(const RankSeries& o) const {
  RankSeries r = *this;
  for (auto [e, c] : o.terms_)
    if ((r.terms_[e] -= c) == 0) r.terms_.erase(e);
  return r;
}

RankSeries RankSeries::operator*(const RankSeries& o) const {
  RankSeries r;
  for (auto [e1, c1] : terms_)
    for (auto [e2, c2] : o.terms_) r += monomial(e1 + e2, c1 * c2);
  return r;
}

RankSeries RankSeries::shifted(int l) const {
  RankSeries r;
  for (auto [e, c] : terms_) r.terms_[e + l] = c;
  return r;
}

long RankSeries::coefficient(int exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? 0 : it->second;
}

long RankSeries::total() const {
  long s = 0;
  for (auto [e, c] : terms_) s += c;
  return s;
}

bool RankSeries::nonnegative() const {
  return std::all_of(terms_.begin(), terms_.end(), [](auto& t) { return t.second >= 0; });
}

std::string RankSeries::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto [e, c] : terms_) {
    if (!out.empty()) out += " + ";
    if (e == 0) {
      out += std::to_string(c);
      continue;
    }
    if (c == -1) out += "-";
    else if (c != 1) out += std::to_string(c) + "*";
    out += "v^" + std::to_string(e);
  }
  return out;
}

RankSeries RankSeries::parse(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s += ch;
  RankSeries r;
  if (s == "0" || s.empty()) return r;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find('+', pos + 1);
    // A '+' directly after '^' belongs to the exponent.
    while (next != std::string::npos && s[next - 1] == '^') next = s.find('+', next + 1);
    std::string term = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!term.empty() && term[0] == '+') term.erase(0, 1);
    long c = 1;
    int e = 0;
    auto v = term.find('v');
    if (v == std::string::npos) {
      c = std::stol(term);
    } else {
      std::string head = term.substr(0, v);
      if (!head.empty() && head.back() == '*') head.pop_back();
      if (head == "-") c = -1;
      else if (!head.empty()) c = std::stol(head);
      std::string tail = term.substr(v + 1);
      e = tail.empty() ? 1 : std::stoi(tail.substr(1));
    }
    r += monomial(e, c);
    if (next == std::string::npos) break;
    pos = next;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Monomials

int total_exponent(const Exponents& e) { return e[0] + e[1] + e[2]; }

int monomial_count(int nvars, int total) {
  if (total < 0) return 0;
  switch (nvars) {
    case 1: return 1;
    case 2: return total + 1;
    default: return (total + 1) * (total + 2) / 2;
  }
}

int monomial_index(int nvars, const Exponents& e) {
  switch (nvars) {
    case 1: return 0;
    case 2: return e[1];
    default: {
      int s = e[1] + e[2];
      return s * (s + 1) / 2 + e[2];
    }
  }
}

const std::vector<Exponents>& monomials(int nvars, int total) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<Exponents>> cache;
  std::lock_guard lock(mutex);
  auto [it, fresh] = cache.try_emplace({nvars, total});
  if (fresh && total >= 0) {
    auto& out = it->second;
    if (nvars == 1) {
      out.push_back({total, 0, 0});
    } else if (nvars == 2) {
      for (int b = 0; b <= total; ++b) out.push_back({total - b, b, 0});
    } else {
      for (int s = 0; s <= total; ++s)
        for (int c = 0; c <= s; ++c) out.push_back({total - s, s - c, c});
    }
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Poly

template <class K>
Poly<K>::Poly(const K& c) {
  if (!c.is_zero()) terms_.push_back({Exponents{0, 0, 0}, c});
}

template <class K>
Poly<K> Poly<K>::monomial(const Exponents& e, const K& c) {
  Poly p;
  if (!c.is_zero()) p.terms_.push_back({e, c});
  return p;
}

template <class K>
Poly<K> Poly<K>::linear_form(std::span<const long> coefficients) {
  Poly p;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    Exponents e{0, 0, 0};
    e[i] = 1;
    p.terms_.push_back({e, K(coefficients[i])});
  }
  p.normalize();
  return p;
}

template <class K>
void Poly<K>::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> out;
  for (auto& t : terms_) {
    if (!out.empty() && out.back().first == t.first) out.back().second += t.second;
    else out.push_back(std::move(t));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.second.is_zero(); }),
            out.end());
  terms_ = std::move(out);
}

template <class K>
int Poly<K>::degree() const {
  return terms_.empty() ? -1 : 2 * total_exponent(terms_.front().first);
}

template <class K>
bool Poly<K>::is_homogeneous() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return 2 * total_exponent(t.first) == degree(); });
}

template <class K>
K Poly<K>::coefficient(const Exponents& e) const {
  for (const auto& t : terms_)
    if (t.first == e) return t.second;
  return K(0);
}

template <class K>
Poly<K> Poly<K>::operator+(const Poly& o) const {
  Poly r;
  r.terms_.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
      r.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      K c = terms_[i].second + o.terms_[j].second;
      if (!c.is_zero()) r.terms_.push_back({terms_[i].first, c});
      ++i, ++j;
    }
  }
  return r;
}

template <class K>
Poly<K> Poly<K>::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

template <class K>
Poly<K> Poly<K>::operator-(const Poly& o) const {
  return *this + (-o);
}

template <class K>
Poly<K> Poly<K>::operator*(const Poly& o) const {
  Poly r;
  if (is_zero() || o.is_zero()) return r;
  r.terms_.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      Exponents e;
      for (int k = 0; k < kMaxVars; ++k) e[k] = a.first[k] + b.first[k];
      r.terms_.push_back({e, a.second * b.second});
    }
  r.normalize();
  return r;
}

template <class K>
Poly<K> Poly<K>::scaled(const K& c) const {
  if (c.is_zero()) return {};
  Poly r = *this;
  for (auto& t : r.terms_) t.second *= c;
  return r;
}

template <class K>
Poly<K> Poly<K>::times(const Exponents& e) const {
  Poly r = *this;
  for (auto& t : r.terms_)
    for (int k = 0; k < kMaxVars; ++k) t.first[k] += e[k];
  return r;
}

template <class K>
Poly<K> Poly<K>::pow(int k) const {
  Poly r(K(1));
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

template <class K>
std::string Poly<K>::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [e, c] : terms_) {
    std::string mono;
    for (int k = 0; k < kMaxVars; ++k) {
      if (e[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(k + 1);
      if (e[k] > 1) mono += "^" + std::to_string(e[k]);
    }
    std::string coef = c.str();
    std::string term;
    if (mono.empty()) term = coef;
    else if (coef == "1") term = mono;
    else if (coef == "-1") term = "-" + mono;
    else term = coef + "*" + mono;
    if (!out.empty()) out += term[0] == '-' ? " - " + term.substr(1) : " + " + term;
    else out = term;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Element

template <class K>
bool Element<K>::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](const Poly<K>& p) { return p.is_zero(); });
}

template <class K>
Element<K> Element<K>::operator+(const Element& o) const {
  Element r{degree, coords};
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] += o.coords[i];
  return r;
}

template <class K>
Element<K> Element<K>::operator-(const Element& o) const {
  Element r{degree, coords};
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] -= o.coords[i];
  return r;
}

template <class K>
Element<K> Element<K>::operator-() const {
  Element r{degree, coords};
  for (auto& c : r.coords) c = -c;
  return r;
}

template <class K>
Element<K> Element<K>::scaled(const Poly<K>& p) const {
  Element r{degree + std::max(p.degree(), 0), coords};
  for (auto& c : r.coords) c = c * p;
  return r;
}

// ---------------------------------------------------------------------------
// Slices

SliceLayout::SliceLayout(int nv, std::span<const int> ambient, int deg,
                         const std::vector<int>* coordinate_order)
    : nvars(nv), degree(deg), offset(ambient.size(), -1), exps(ambient.size(), -1) {
  auto add = [&](std::size_t c) {
    int diff = deg - ambient[c];
    if (diff < 0 || diff % 2 != 0) return;
    exps[c] = diff / 2;
    offset[c] = size;
    size += monomial_count(nvars, exps[c]);
  };
  if (coordinate_order) {
    for (int c : *coordinate_order) add(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < ambient.size(); ++c) add(c);
  }
}

namespace {

template <class K>
void write_multiple(const Element<K>& g, const Exponents& mu, const SliceLayout& layout,
                    std::vector<K>& v) {
  for (std::size_t c = 0; c < g.coords.size(); ++c) {
    if (layout.offset[c] < 0) continue;
    for (const auto& [e, k] : g.coords[c].terms()) {
      Exponents f{e[0] + mu[0], e[1] + mu[1], e[2] + mu[2]};
      v[layout.offset[c] + monomial_index(layout.nvars, f)] = k;
    }
  }
}

template <class K>
std::vector<K> dense_multiple(const Element<K>& g, const Exponents& mu, const SliceLayout& layout) {
  std::vector<K> v(layout.size);
  write_multiple(g, mu, layout, v);
  return v;
}

// Inserts all S-multiples of the generators landing in the layout's degree.
template <class K>
void insert_multiples(Echelon<K>& ech, const std::vector<Element<K>>& gens, const SliceLayout& layout) {
  for (const auto& g : gens) {
    int diff = layout.degree - g.degree;
    if (diff < 0 || diff % 2 != 0) continue;
    for (const auto& mu : monomials(layout.nvars, diff / 2)) ech.insert(dense_multiple(g, mu, layout));
  }
}

// Adds to `found` new generators so that their S-span contains `target` in
// this degree.
template <class K>
void grow(std::vector<Element<K>>& found, const std::vector<std::vector<K>>& target,
          const SliceLayout& layout, std::size_t ncoords) {
  if (target.empty()) return;
  Echelon<K> have(layout.size);
  insert_multiples(have, found, layout);
  if (have.rank() == static_cast<int>(target.size())) return;
  for (const auto& t : target)
    if (have.insert(t)) found.push_back(from_dense<K>(t, layout, ncoords));
}

}  // namespace

template <class K>
std::vector<K> to_dense(const Element<K>& x, const SliceLayout& layout) {
  std::vector<K> v(layout.size);
  write_multiple(x, Exponents{0, 0, 0}, layout, v);
  return v;
}

template <class K>
Element<K> from_dense(std::span<const K> v, const SliceLayout& layout, std::size_t ncoords) {
  Element<K> x;
  x.degree = layout.degree;
  x.coords.resize(ncoords);
  for (std::size_t c = 0; c < ncoords && c < layout.offset.size(); ++c) {
    if (layout.offset[c] < 0) continue;
    const auto& monos = monomials(layout.nvars, layout.exps[c]);
    Poly<K> p;
    for (std::size_t i = 0; i < monos.size(); ++i)
      if (!v[layout.offset[c] + i].is_zero()) p += Poly<K>::monomial(monos[i], v[layout.offset[c] + i]);
    x.coords[c] = std::move(p);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Echelon

template <class K>
int Echelon<K>::reduce(std::vector<K>& v, std::vector<K>* combo) const {
  for (const auto& [p, row] : rows_) {
    if (v[p].is_zero()) continue;
    K f = v[p];
    for (int j = p; j < ncols_; ++j)
      if (!row.v[j].is_zero()) v[j] -= f * row.v[j];
    if (combo)
      for (std::size_t k = 0; k < row.combo.size(); ++k)
        if (!row.combo[k].is_zero()) (*combo)[k] += f * row.combo[k];
  }
  for (int j = 0; j < ncols_; ++j)
    if (!v[j].is_zero()) return j;
  return -1;
}

template <class K>
bool Echelon<K>::insert(std::vector<K> v) {
  std::vector<K> acc;
  if (track_) acc.assign(inserted_ + 1, K(0));
  int p = reduce(v, track_ ? &acc : nullptr);
  std::vector<K> combo;
  if (track_) {
    combo.assign(inserted_ + 1, K(0));
    for (int k = 0; k <= inserted_; ++k) combo[k] = -acc[k];
    combo[inserted_] += K(1);
  }
  ++inserted_;
  if (p < 0) {
    if (track_) deps_.push_back(std::move(combo));
    return false;
  }
  K inv = v[p].inverse();
  for (int j = p; j < ncols_; ++j) v[j] *= inv;
  for (auto& c : combo) c *= inv;
  rows_.emplace(p, Row{std::move(v), std::move(combo)});
  return true;
}

template <class K>
std::vector<std::vector<K>> nullspace(const std::vector<std::vector<K>>& input, int ncols) {
  std::vector<std::vector<K>> a = input;
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < ncols && r < static_cast<int>(a.size()); ++c) {
    int p = r;
    while (p < static_cast<int>(a.size()) && a[p][c].is_zero()) ++p;
    if (p == static_cast<int>(a.size())) continue;
    std::swap(a[p], a[r]);
    K inv = a[r][c].inverse();
    for (int j = c; j < ncols; ++j) a[r][j] *= inv;
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
      if (i == r || a[i][c].is_zero()) continue;
      K f = a[i][c];
      for (int j = c; j < ncols; ++j)
        if (!a[r][j].is_zero()) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<K>> out;
  for (int f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<K> x(ncols, K(0));
    x[f] = K(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = -a[i][f];
    out.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// GradedMatrix / Submodule

template <class K>
bool GradedMatrix<K>::homogeneous() const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < row_degrees.size(); ++i) {
      const auto& p = columns[j].coords[i];
      if (p.is_zero()) continue;
      if (!p.is_homogeneous() || p.degree() != col_degrees[j] - row_degrees[i]) return false;
    }
  return true;
}

template <class K>
Submodule<K>::Submodule(int nvars, std::vector<int> ambient, std::vector<Element<K>> generators)
    : nvars_(nvars), ambient_(std::move(ambient)) {
  for (auto& g : generators) {
    if (g.coords.size() != ambient_.size()) throw std::invalid_argument("generator has wrong length");
    if (!g.is_zero()) gens_.push_back(std::move(g));
  }
}

template <class K>
int Submodule<K>::min_generator_degree() const {
  int d = 0;
  for (std::size_t i = 0; i < gens_.size(); ++i) d = i ? std::min(d, gens_[i].degree) : gens_[i].degree;
  return d;
}

template <class K>
int Submodule<K>::max_generator_degree() const {
  int d = 0;
  for (std::size_t i = 0; i < gens_.size(); ++i) d = i ? std::max(d, gens_[i].degree) : gens_[i].degree;
  return d;
}

template <class K>
int Submodule<K>::min_ambient_degree() const {
  return ambient_.empty() ? 0 : *std::min_element(ambient_.begin(), ambient_.end());
}

template <class K>
Echelon<K> Submodule<K>::slice(const SliceLayout& layout) const {
  Echelon<K> ech(layout.size);
  insert_multiples(ech, gens_, layout);
  return ech;
}

template <class K>
Echelon<K> Submodule<K>::slice(int n) const {
  return slice(SliceLayout(nvars_, ambient_, n));
}

template <class K>
bool Submodule<K>::contains(const Element<K>& x) const {
  if (x.is_zero()) return true;
  SliceLayout layout(nvars_, ambient_, x.degree);
  auto v = to_dense(x, layout);
  return slice(layout).reduce(v) < 0;
}

template <class K>
Submodule<K> Submodule<K>::minimal() const {
  std::vector<Element<K>> sorted = gens_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Element<K>& a, const Element<K>& b) { return a.degree < b.degree; });
  std::vector<Element<K>> chosen;
  std::size_t i = 0;
  while (i < sorted.size()) {
    int d = sorted[i].degree;
    SliceLayout layout(nvars_, ambient_, d);
    Echelon<K> ech(layout.size);
    insert_multiples(ech, chosen, layout);
    for (; i < sorted.size() && sorted[i].degree == d; ++i)
      if (ech.insert(to_dense(sorted[i], layout))) chosen.push_back(sorted[i]);
  }
  return Submodule(nvars_, ambient_, std::move(chosen));
}

template <class K>
std::optional<std::vector<Element<K>>> Submodule<K>::free_basis() const {
  Submodule m = minimal();
  if (m.gens_.size() > ambient_.size()) return std::nullopt;
  if (generic_rank(m.gens_, nvars_, ncoords()) != static_cast<int>(m.gens_.size())) return std::nullopt;
  return m.gens_;
}

template <class K>
RankSeries Submodule<K>::rank_series() const {
  auto basis = free_basis();
  if (!basis) throw std::runtime_error("module not certified graded free");
  RankSeries r;
  for (const auto& b : *basis) r += RankSeries::monomial(b.degree);
  return r;
}

template <class K>
Submodule<K> Submodule<K>::project(const std::vector<int>& keep) const {
  std::vector<int> amb;
  for (int c : keep) amb.push_back(ambient_[c]);
  std::vector<Element<K>> gens;
  for (const auto& g : gens_) {
    Element<K> h{g.degree, {}};
    for (int c : keep) h.coords.push_back(g.coords[c]);
    gens.push_back(std::move(h));
  }
  return Submodule(nvars_, std::move(amb), std::move(gens));
}

template <class K>
Submodule<K> Submodule<K>::restrict_to(const std::vector<bool>& allowed, int cap) const {
  std::vector<int> order;
  for (int c = 0; c < ncoords(); ++c)
    if (!allowed[c]) order.push_back(c);
  const std::size_t eliminated = order.size();
  for (int c = 0; c < ncoords(); ++c)
    if (allowed[c]) order.push_back(c);
  std::vector<Element<K>> found;
  if (gens_.empty()) return Submodule(nvars_, ambient_, {});
  for (int n = min_generator_degree(); n <= cap; ++n) {
    SliceLayout layout(nvars_, ambient_, n, &order);
    if (layout.size == 0) continue;
    int boundary = 0;
    for (std::size_t i = 0; i < eliminated; ++i) {
      int c = order[i];
      if (layout.offset[c] >= 0) boundary += monomial_count(nvars_, layout.exps[c]);
    }
    Echelon<K> ech = slice(layout);
    std::vector<std::vector<K>> target;
    for (const auto& [p, row] : ech.rows())
      if (p >= boundary) target.push_back(row.v);
    grow(found, target, layout, ambient_.size());
  }
  return Submodule(nvars_, ambient_, std::move(found));
}

template <class K>
Submodule<K> Submodule<K>::shifted(int l) const {
  std::vector<int> amb = ambient_;
  for (auto& d : amb) d -= l;
  std::vector<Element<K>> gens = gens_;
  for (auto& g : gens) g.degree -= l;
  return Submodule(nvars_, std::move(amb), std::move(gens));
}

template <class K>
GradedMatrix<K> Submodule<K>::presentation() const {
  GradedMatrix<K> m;
  m.nvars = nvars_;
  m.row_degrees = ambient_;
  for (const auto& g : gens_) m.col_degrees.push_back(g.degree);
  m.columns = gens_;
  return m;
}

template <class K>
std::vector<std::vector<K>> degree_slice(const Submodule<K>& m, int d) {
  std::vector<std::vector<K>> out;
  Echelon<K> ech = m.slice(d);
  for (const auto& [p, row] : ech.rows()) out.push_back(row.v);
  return out;
}

template <class K>
Submodule<K> graded_kernel(const GradedMatrix<K>& f, int cap) {
  std::vector<Element<K>> found;
  if (f.col_degrees.empty()) return Submodule<K>(f.nvars, f.col_degrees, {});
  const int lo = *std::min_element(f.col_degrees.begin(), f.col_degrees.end());
  for (int n = lo; n <= cap; ++n) {
    SliceLayout src(f.nvars, f.col_degrees, n), tgt(f.nvars, f.row_degrees, n);
    if (src.size == 0) continue;
    Echelon<K> ech(tgt.size, true);
    for (std::size_t j = 0; j < f.columns.size(); ++j) {
      if (src.offset[j] < 0) continue;
      for (const auto& mu : monomials(f.nvars, src.exps[j])) ech.insert(dense_multiple(f.columns[j], mu, tgt));
    }
    std::vector<std::vector<K>> target;
    for (auto dep : ech.dependencies()) {
      dep.resize(src.size, K(0));
      target.push_back(std::move(dep));
    }
    grow(found, target, src, f.col_degrees.size());
  }
  return Submodule<K>(f.nvars, f.col_degrees, std::move(found));
}

template <class K>
Submodule<K> module_sum(const Submodule<K>& m, const Submodule<K>& n) {
  if (m.ambient() != n.ambient()) throw std::invalid_argument("ambient mismatch");
  auto gens = m.generators();
  gens.insert(gens.end(), n.generators().begin(), n.generators().end());
  return Submodule<K>(m.nvars(), m.ambient(), std::move(gens));
}

template <class K>
Submodule<K> module_intersection(const Submodule<K>& m, const Submodule<K>& n, int cap) {
  if (m.ambient() != n.ambient()) throw std::invalid_argument("ambient mismatch");
  std::vector<Element<K>> found;
  if (m.is_zero() || n.is_zero()) return Submodule<K>(m.nvars(), m.ambient(), {});
  const int lo = std::max(m.min_generator_degree(), n.min_generator_degree());
  for (int d = lo; d <= cap; ++d) {
    SliceLayout layout(m.nvars(), m.ambient(), d);
    if (layout.size == 0) continue;
    const int w = layout.size;
    Echelon<K> ech(2 * w);
    Echelon<K> ms = m.slice(layout), ns = n.slice(layout);
    for (const auto& [p, row] : ms.rows()) {
      std::vector<K> v(2 * w);
      std::copy(row.v.begin(), row.v.end(), v.begin());
      std::copy(row.v.begin(), row.v.end(), v.begin() + w);
      ech.insert(std::move(v));
    }
    for (const auto& [p, row] : ns.rows()) {
      std::vector<K> v(2 * w);
      std::copy(row.v.begin(), row.v.end(), v.begin());
      ech.insert(std::move(v));
    }
    std::vector<std::vector<K>> target;
    for (const auto& [p, row] : ech.rows())
      if (p >= w) target.emplace_back(row.v.begin() + w, row.v.end());
    grow(found, target, layout, m.ambient().size());
  }
  return Submodule<K>(m.nvars(), m.ambient(), std::move(found));
}

// ---------------------------------------------------------------------------
// Generic rank

namespace {

template <class E, class Ops>
int rank_of(std::vector<std::vector<E>> a, const Ops& ops) {
  int r = 0;
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && ops.is_zero(a[p][c])) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    E inv = ops.inverse(a[r][c]);
    for (int i = r + 1; i < rows; ++i) {
      if (ops.is_zero(a[i][c])) continue;
      E f = ops.mul(a[i][c], inv);
      for (int j = c; j < cols; ++j) a[i][j] = ops.sub(a[i][j], ops.mul(f, a[r][j]));
    }
    ++r;
  }
  return r;
}

struct RationalOps {
  bool is_zero(const Rational& x) const { return x.is_zero(); }
  Rational inverse(const Rational& x) const { return x.inverse(); }
  Rational mul(const Rational& a, const Rational& b) const { return a * b; }
  Rational sub(const Rational& a, const Rational& b) const { return a - b; }
};

// Arithmetic in F_p[t]/(f) with f irreducible of degree m.
struct ExtensionField {
  using Elem = std::vector<std::uint64_t>;  // length m, low degree first
  std::uint64_t p;
  int m;
  Elem f;  // monic, length m + 1

  static void trim(Elem& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  Elem polymod(Elem a, const Elem& mod) const {
    trim(a);
    const int dm = static_cast<int>(mod.size()) - 1;
    std::uint64_t lead_inv = inv_scalar(mod.back());
    while (static_cast<int>(a.size()) - 1 >= dm) {
      std::uint64_t c = a.back() * lead_inv % p;
      int shift = static_cast<int>(a.size()) - 1 - dm;
      for (int i = 0; i <= dm; ++i) a[shift + i] = (a[shift + i] + p - c * mod[i] % p) % p;
      trim(a);
    }
    return a;
  }
  Elem polymul(const Elem& a, const Elem& b) const {
    if (a.empty() || b.empty()) return {};
    Elem c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    return c;
  }
  std::uint64_t inv_scalar(std::uint64_t x) const {
    std::uint64_t acc = 1, base = x % p, e = p - 2;
    while (e) {
      if (e & 1) acc = acc * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return acc;
  }
  Elem polygcd(Elem a, Elem b) const {
    trim(a), trim(b);
    while (!b.empty()) {
      Elem r = polymod(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return a;
  }
  bool irreducible(const Elem& g) const {
    const int d = static_cast<int>(g.size()) - 1;
    Elem x{0, 1};
    Elem h = x;
    for (int i = 1; i <= d / 2; ++i) {
      // h <- h^p mod g
      Elem acc{1}, base = h;
      std::uint64_t e = p;
      while (e) {
        if (e & 1) acc = polymod(polymul(acc, base), g);
        base = polymod(polymul(base, base), g);
        e >>= 1;
      }
      h = acc;
      Elem diff = h;
      diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
      diff[1] = (diff[1] + p - 1) % p;
      Elem gg = polygcd(g, diff);
      if (gg.size() > 1) return false;
    }
    return true;
  }

  explicit ExtensionField(std::uint64_t prime) : p(prime), m(1) {
    std::uint64_t size = p;
    while (size < (1u << 24)) size *= p, ++m;
    for (std::uint64_t code = 1;; ++code) {
      Elem g(m + 1, 0);
      g[m] = 1;
      std::uint64_t c = code;
      for (int i = 0; i < m; ++i) g[i] = c % p, c /= p;
      if (g[0] != 0 && irreducible(g)) {
        f = g;
        break;
      }
    }
  }

  Elem normalize(Elem a) const {
    a = polymod(std::move(a), f);
    a.resize(m, 0);
    return a;
  }
  bool is_zero(const Elem& a) const {
    return std::all_of(a.begin(), a.end(), [](std::uint64_t x) { return x == 0; });
  }
  Elem mul(const Elem& a, const Elem& b) const { return normalize(polymul(a, b)); }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem c(m);
    for (int i = 0; i < m; ++i) c[i] = (a[i] + p - b[i]) % p;
    return c;
  }
  Elem add(const Elem& a, const Elem& b) const {
    Elem c(m);
    for (int i = 0; i < m; ++i) c[i] = (a[i] + b[i]) % p;
    return c;
  }
  Elem scalar(std::uint64_t x) const {
    Elem c(m, 0);
    c[0] = x % p;
    return c;
  }
  Elem inverse(const Elem& a) const {
    // Extended Euclid on (f, a).
    Elem r0 = f, r1 = a, s0{}, s1{1};
    trim(r1);
    while (!r1.empty()) {
      // q = r0 / r1
      Elem q, r = r0;
      trim(r);
      const int d1 = static_cast<int>(r1.size()) - 1;
      std::uint64_t li = inv_scalar(r1.back());
      q.assign(r.size() >= r1.size() ? r.size() - r1.size() + 1 : 0, 0);
      while (static_cast<int>(r.size()) - 1 >= d1 && !r.empty()) {
        std::uint64_t c = r.back() * li % p;
        int shift = static_cast<int>(r.size()) - 1 - d1;
        q[shift] = c;
        for (int i = 0; i <= d1; ++i) r[shift + i] = (r[shift + i] + p - c * r1[i] % p) % p;
        trim(r);
      }
      Elem qs = polymul(q, s1);
      Elem s2(std::max(s0.size(), qs.size()), 0);
      for (std::size_t i = 0; i < s2.size(); ++i) {
        std::uint64_t a0 = i < s0.size() ? s0[i] : 0, b0 = i < qs.size() ? qs[i] : 0;
        s2[i] = (a0 + p - b0) % p;
      }
      trim(s2);
      r0 = std::move(r1), r1 = std::move(r);
      s0 = std::move(s1), s1 = std::move(s2);
    }
    // r0 is a nonzero constant.
    std::uint64_t ci = inv_scalar(r0[0]);
    for (auto& x : s0) x = x * ci % p;
    return normalize(s0);
  }
};

template <class K>
struct RankEvaluator;

template <>
struct RankEvaluator<Rational> {
  static int run(const std::vector<Element<Rational>>& els, int nvars, int ncoords) {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<long> dist(-100000, 100000);
    int best = 0;
    for (int trial = 0; trial < 3 && best < static_cast<int>(els.size()); ++trial) {
      std::vector<std::vector<Rational>> pw(nvars);
      for (int k = 0; k < nvars; ++k) pw[k] = {Rational(1), Rational(dist(rng))};
      auto power = [&](int k, int e) {
        while (static_cast<int>(pw[k].size()) <= e) pw[k].push_back(pw[k].back() * pw[k][1]);
        return pw[k][e];
      };
      std::vector<std::vector<Rational>> a(els.size(), std::vector<Rational>(ncoords));
      for (std::size_t i = 0; i < els.size(); ++i)
        for (int c = 0; c < ncoords; ++c)
          for (const auto& [e, coef] : els[i].coords[c].terms()) {
            Rational v = coef;
            for (int k = 0; k < nvars; ++k) v = v * power(k, e[k]);
            a[i][c] += v;
          }
      best = std::max(best, rank_of(std::move(a), RationalOps{}));
    }
    return best;
  }
};

template <>
struct RankEvaluator<ModP> {
  static int run(const std::vector<Element<ModP>>& els, int nvars, int ncoords) {
    static thread_local std::map<std::uint64_t, ExtensionField> fields;
    const std::uint64_t p = static_cast<std::uint64_t>(ModP::characteristic());
    auto it = fields.find(p);
    if (it == fields.end()) it = fields.emplace(p, ExtensionField(p)).first;
    const ExtensionField& F = it->second;
    std::mt19937_64 rng(20240611);
    int best = 0;
    for (int trial = 0; trial < 3 && best < static_cast<int>(els.size()); ++trial) {
      std::vector<std::vector<ExtensionField::Elem>> pw(nvars);
      for (int k = 0; k < nvars; ++k) {
        ExtensionField::Elem x(F.m);
        for (auto& c : x) c = rng() % p;
        pw[k] = {F.scalar(1), x};
      }
      auto power = [&](int k, int e) {
        while (static_cast<int>(pw[k].size()) <= e) pw[k].push_back(F.mul(pw[k].back(), pw[k][1]));
        return pw[k][e];
      };
      std::vector<std::vector<ExtensionField::Elem>> a(
          els.size(), std::vector<ExtensionField::Elem>(ncoords, F.scalar(0)));
      for (std::size_t i = 0; i < els.size(); ++i)
        for (int c = 0; c < ncoords; ++c)
          for (const auto& [e, coef] : els[i].coords[c].terms()) {
            ExtensionField::Elem v = F.scalar(coef.value());
            for (int k = 0; k < nvars; ++k)
              if (e[k]) v = F.mul(v, power(k, e[k]));
            a[i][c] = F.add(a[i][c], v);
          }
      best = std::max(best, rank_of(std::move(a), F));
    }
    return best;
  }
};

}  // namespace

template <class K>
int generic_rank(const std::vector<Element<K>>& elements, int nvars, int ncoords) {
  if (elements.empty() || ncoords == 0) return 0;
  return RankEvaluator<K>::run(elements, nvars, ncoords);
}

template <class K>
std::optional<std::vector<Poly<K>>> basis_coefficients(const std::vector<Element<K>>& basis,
                                                      const std::vector<int>& ambient, int nvars,
                                                      const Element<K>& x) {
  std::vector<Poly<K>> out(basis.size());
  if (x.is_zero()) return out;
  SliceLayout layout(nvars, ambient, x.degree);
  Echelon<K> ech(layout.size, true);
  std::vector<std::pair<int, Exponents>> origin;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    int diff = x.degree - basis[i].degree;
    if (diff < 0 || diff % 2 != 0) continue;
    for (const auto& mu : monomials(nvars, diff / 2)) {
      ech.insert(dense_multiple(basis[i], mu, layout));
      origin.push_back({static_cast<int>(i), mu});
    }
  }
  auto v = to_dense(x, layout);
  std::vector<K> combo(ech.inserted(), K(0));
  if (ech.reduce(v, &combo) >= 0) return std::nullopt;
  for (std::size_t k = 0; k < origin.size(); ++k)
    if (!combo[k].is_zero()) out[origin[k].first] += Poly<K>::monomial(origin[k].second, combo[k]);
  return out;
}

#define ALCSHEAF_INSTANTIATE(K)                                                                  \
  template class Poly<K>;                                                                        \
  template struct Element<K>;                                                                    \
  template class Echelon<K>;                                                                     \
  template struct GradedMatrix<K>;                                                               \
  template class Submodule<K>;                                                                   \
  template std::vector<K> to_dense(const Element<K>&, const SliceLayout&);                       \
  template Element<K> from_dense(std::span<const K>, const SliceLayout&, std::size_t);           \
  template std::vector<std::vector<K>> nullspace(const std::vector<std::vector<K>>&, int);       \
  template std::vector<std::vector<K>> degree_slice(const Submodule<K>&, int);                   \
  template Submodule<K> graded_kernel(const GradedMatrix<K>&, int);                              \
  template Submodule<K> module_sum(const Submodule<K>&, const Submodule<K>&);                    \
  template Submodule<K> module_intersection(const Submodule<K>&, const Submodule<K>&, int);      \
  template int generic_rank(const std::vector<Element<K>>&, int, int);                           \
  template std::optional<std::vector<Poly<K>>> basis_coefficients(                               \
      const std::vector<Element<K>>&, const std::vector<int>&, int, const Element<K>&);

ALCSHEAF_INSTANTIATE(Rational)
ALCSHEAF_INSTANTIATE(ModP)

}  // namespace alcsheaf
