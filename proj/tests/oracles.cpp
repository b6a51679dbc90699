#include "oracles.hpp"

#include <set>
#include <stdexcept>

namespace oracle {

Mat cartan(const std::string& label) {
  static const std::map<std::string, Mat> table = {
      {"A1", {{2}}},
      {"A2", {{2, -1}, {-1, 2}}},
      {"B2", {{2, -1}, {-2, 2}}},
      {"C2", {{2, -2}, {-1, 2}}},
      {"G2", {{2, -3}, {-1, 2}}},
      {"A3", {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}},
      {"B3", {{2, -1, 0}, {-1, 2, -1}, {0, -2, 2}}},
      {"C3", {{2, -1, 0}, {-1, 2, -2}, {0, -1, 2}}},
  };
  return table.at(label);
}

namespace {

Mat identity(std::size_t n) {
  Mat m(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

// s_i(a_j) = a_j - <a_j, a_i^v> a_i, applied on the left.
Mat apply_simple(const Mat& c, int i, const Mat& m) {
  Mat out = m;
  const std::size_t n = c.size();
  for (std::size_t col = 0; col < n; ++col) {
    long pairing = 0;
    for (std::size_t j = 0; j < n; ++j) pairing += c[i][j] * m[j][col];
    out[i][col] -= pairing;
  }
  return out;
}

}  // namespace

Mat word_matrix(const Mat& c, const std::vector<int>& word) {
  Mat m = identity(c.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it) m = apply_simple(c, *it, m);
  return m;
}

bool bruhat_leq(const Mat& c, const std::vector<int>& x, const std::vector<int>& y) {
  const Mat target = word_matrix(c, x);
  const std::size_t k = y.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<int> sub;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) sub.push_back(y[i]);
    if (word_matrix(c, sub) == target) return true;
  }
  return false;
}

std::vector<int> length_counts(const Mat& c) {
  std::set<Mat> seen{identity(c.size())};
  std::vector<Mat> layer{identity(c.size())};
  std::vector<int> counts;
  while (!layer.empty()) {
    counts.push_back(static_cast<int>(layer.size()));
    std::vector<Mat> next;
    for (const auto& m : layer)
      for (std::size_t i = 0; i < c.size(); ++i) {
        Mat p = apply_simple(c, static_cast<int>(i), m);
        if (seen.insert(p).second) next.push_back(p);
      }
    layer = std::move(next);
  }
  return counts;
}

std::string poincare_string(const Mat& c) {
  auto counts = length_counts(c);
  std::string out;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (!out.empty()) out += " + ";
    if (counts[l] != 1 || l == 0) out += std::to_string(counts[l]);
    if (l > 0) out += (counts[l] != 1 ? "*" : "") + std::string("v^") + std::to_string(2 * l);
  }
  return out;
}

}  // namespace oracle
