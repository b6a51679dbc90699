#include "alcsheaf/rootsys.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>

namespace alcsheaf {

namespace {

IMat gram_matrix(char type, int n) {
  IMat g(n, IVec(n, 0));
  switch (type) {
    case 'A':
      for (int i = 0; i < n; ++i) {
        g[i][i] = 2;
        if (i + 1 < n) g[i][i + 1] = g[i + 1][i] = -1;
      }
      break;
    case 'B':
      for (int i = 0; i < n; ++i) {
        g[i][i] = i + 1 < n ? 4 : 2;
        if (i + 1 < n) g[i][i + 1] = g[i + 1][i] = -2;
      }
      break;
    case 'C':
      for (int i = 0; i < n; ++i) {
        g[i][i] = i + 1 < n ? 2 : 4;
        if (i + 1 < n) g[i][i + 1] = g[i + 1][i] = (i + 2 == n) ? -2 : -1;
      }
      break;
    case 'G':
      g = {{2, -3}, {-3, 6}};
      break;
    default:
      throw std::invalid_argument("unknown root system type");
  }
  return g;
}

IMat identity_matrix(int n) {
  IMat m(n, IVec(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

long height(const IVec& v) { return std::accumulate(v.begin(), v.end(), 0L); }

}  // namespace

IMat mat_mul(const IMat& a, const IMat& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  IMat c(n, IVec(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      if (a[i][l] != 0)
        for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

RootSystem::RootSystem(char type, int rank) : type_(type), rank_(rank) {
  if (rank < 1 || rank > 3) throw std::invalid_argument("rank must be between 1 and 3");
  char data_type = type;
  if (type == 'D') {
    if (rank != 3) throw std::invalid_argument("type D requires rank 3");
    data_type = 'A';
  } else if ((type == 'B' || type == 'C') && rank == 1) {
    data_type = 'A';
  } else if (type == 'G' && rank != 2) {
    throw std::invalid_argument("type G requires rank 2");
  } else if (type != 'A' && type != 'B' && type != 'C' && type != 'G') {
    throw std::invalid_argument("unknown root system type");
  }
  const int n = rank;
  gram_ = gram_matrix(data_type, n);
  pairing_.assign(n, IVec(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pairing_[i][j] = 2 * gram_[i][j] / gram_[j][j];

  // Weyl group by breadth-first search on left multiplication.
  std::vector<IMat> gens;
  for (int i = 0; i < n; ++i) {
    IMat m = identity_matrix(n);
    for (int k = 0; k < n; ++k) m[i][k] -= pairing_[k][i];
    gens.push_back(m);
  }
  std::map<IMat, int> index;
  weyl_.push_back(identity_matrix(n));
  words_.push_back({});
  index[weyl_[0]] = 0;
  for (std::size_t head = 0; head < weyl_.size(); ++head) {
    for (int i = 0; i < n; ++i) {
      IMat m = mat_mul(gens[i], weyl_[head]);
      if (index.count(m)) continue;
      index[m] = static_cast<int>(weyl_.size());
      std::vector<int> w{i};
      w.insert(w.end(), words_[head].begin(), words_[head].end());
      weyl_.push_back(std::move(m));
      words_.push_back(std::move(w));
    }
  }
  const int order = static_cast<int>(weyl_.size());
  mult_.assign(order * order, 0);
  inverse_.assign(order, 0);
  for (int x = 0; x < order; ++x)
    for (int y = 0; y < order; ++y) {
      int z = index.at(mat_mul(weyl_[x], weyl_[y]));
      mult_[x * order + y] = z;
      if (z == 0) inverse_[x] = y;
    }
  for (int i = 0; i < n; ++i) simple_refl_.push_back(index.at(gens[i]));
  longest_ = static_cast<int>(std::max_element(words_.begin(), words_.end(),
                                               [](auto& a, auto& b) { return a.size() < b.size(); }) -
                              words_.begin());

  // Positive roots from the orbit of the simple roots.
  std::map<IVec, int> seen;
  for (const auto& m : weyl_)
    for (int i = 0; i < n; ++i) {
      IVec v(n);
      for (int r = 0; r < n; ++r) v[r] = m[r][i];
      if (std::all_of(v.begin(), v.end(), [](long x) { return x >= 0; })) seen[v] = 0;
    }
  for (auto& [v, _] : seen) positive_.push_back(v);
  std::sort(positive_.begin(), positive_.end(), [](const IVec& a, const IVec& b) {
    long ha = height(a), hb = height(b);
    if (ha != hb) return ha < hb;
    return a > b;
  });
  for (int i = 0; i < n; ++i) simple_.push_back(i);

  for (const auto& a : positive_) {
    long norm = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) norm += a[i] * gram_[i][j] * a[j];
    IVec d(n);
    for (int i = 0; i < n; ++i) {
      if ((a[i] * gram_[i][i]) % norm != 0) throw std::logic_error("non-integral coroot");
      d[i] = a[i] * gram_[i][i] / norm;
    }
    IVec form(n, 0);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) form[k] += d[i] * pairing_[k][i];
    coroot_simple_.push_back(d);
    coroot_form_.push_back(form);
  }
  theta_ = static_cast<int>(
      std::max_element(coroot_simple_.begin(), coroot_simple_.end(),
                       [](const IVec& a, const IVec& b) { return height(a) < height(b); }) -
      coroot_simple_.begin());

  for (int a = 0; a < num_positive(); ++a) {
    IMat m = identity_matrix(n);
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < n; ++k) m[r][k] -= positive_[a][r] * coroot_form_[a][k];
    reflection_.push_back(index.at(m));
  }
}

std::string RootSystem::label() const { return std::string(1, type_) + std::to_string(rank_); }

long RootSystem::pair(std::span<const long> x, int a) const {
  long s = 0;
  for (int k = 0; k < rank_; ++k) s += x[k] * coroot_form_[a][k];
  return s;
}

int RootSystem::find_root(std::span<const long> v, int* sign) const {
  for (int a = 0; a < num_positive(); ++a) {
    if (std::equal(v.begin(), v.end(), positive_[a].begin())) {
      if (sign) *sign = 1;
      return a;
    }
    bool neg = true;
    for (int k = 0; k < rank_; ++k) neg = neg && v[k] == -positive_[a][k];
    if (neg) {
      if (sign) *sign = -1;
      return a;
    }
  }
  return -1;
}

IVec RootSystem::act(int w, std::span<const long> x) const {
  IVec y(rank_, 0);
  for (int r = 0; r < rank_; ++r)
    for (int k = 0; k < rank_; ++k) y[r] += weyl_[w][r][k] * x[k];
  return y;
}

int RootSystem::find_element(const IMat& m) const {
  for (int w = 0; w < order(); ++w)
    if (weyl_[w] == m) return w;
  return -1;
}

std::vector<const IMat*> RootSystem::weyl_matrices() const {
  std::vector<const IMat*> out;
  for (const auto& m : weyl_) out.push_back(&m);
  return out;
}

RootSystem make_root_system(const std::string& label) {
  if (label.size() < 2) throw std::invalid_argument("root system label like A2 expected");
  char t = label[0];
  int r = 0;
  try {
    r = std::stoi(label.substr(1));
  } catch (const std::exception&) {
    throw std::invalid_argument("root system label like A2 expected");
  }
  return RootSystem(t, r);
}

bool gkm_check(const RootSystem& rs, int characteristic) {
  if (characteristic == 2) return false;
  auto reduce = [&](long v) {
    if (characteristic == 0) return v;
    long r = v % characteristic;
    return r < 0 ? r + characteristic : r;
  };
  const int n = rs.rank();
  for (int a = 0; a < rs.num_positive(); ++a) {
    const IVec& p = rs.coroot_form(a);
    if (std::all_of(p.begin(), p.end(), [&](long x) { return reduce(x) == 0; })) return false;
    for (int b = a + 1; b < rs.num_positive(); ++b) {
      const IVec& q = rs.coroot_form(b);
      bool independent = false;
      for (int i = 0; i < n && !independent; ++i)
        for (int j = i + 1; j < n && !independent; ++j)
          independent = reduce(p[i] * q[j] - p[j] * q[i]) != 0;
      if (!independent) return false;
    }
  }
  return true;
}

AffineMap AffineMap::identity(int rank) { return {identity_matrix(rank), IVec(rank, 0)}; }

AffineMap AffineMap::translation(const IVec& v) {
  return {identity_matrix(static_cast<int>(v.size())), v};
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  AffineMap out{mat_mul(linear, inner.linear), shift};
  for (std::size_t r = 0; r < shift.size(); ++r)
    for (std::size_t k = 0; k < shift.size(); ++k) out.shift[r] += linear[r][k] * inner.shift[k];
  return out;
}

IVec AffineMap::apply(std::span<const long> x, long scale) const {
  IVec y(shift.size());
  for (std::size_t r = 0; r < shift.size(); ++r) {
    y[r] = scale * shift[r];
    for (std::size_t k = 0; k < shift.size(); ++k) y[r] += linear[r][k] * x[k];
  }
  return y;
}

AffineMap affine_reflection(const RootSystem& rs, int root, long n) {
  AffineMap m{rs.matrix(rs.reflection(root)), rs.root(root)};
  for (auto& x : m.shift) x *= n;
  return m;
}

}  // namespace alcsheaf
