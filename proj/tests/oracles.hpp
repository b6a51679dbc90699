#pragma once

// Reference computations that share no code with the library. They work
// from hard-coded Cartan matrices and elementary enumeration.

#include <map>
#include <string>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<long>>;

/// Cartan matrix with entry (i, j) = <a_j, a_i^v>; B_n has a_n short,
/// C_n has a_n long, G2 has a_1 short.
Mat cartan(const std::string& label);

/// Matrix of the product s_{i_1} ... s_{i_k} acting on simple-root coordinates.
Mat word_matrix(const Mat& cartan, const std::vector<int>& word);

/// Bruhat order through the subword property of a reduced word for y.
bool bruhat_leq(const Mat& cartan, const std::vector<int>& x, const std::vector<int>& y);

/// Number of Weyl group elements of each length.
std::vector<int> length_counts(const Mat& cartan);

/// Laurent polynomial sum_x v^{2 l(x)} printed in the library's format.
std::string poincare_string(const Mat& cartan);

}  // namespace oracle
