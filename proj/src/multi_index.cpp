#include "levi/multi_index.hpp"

#include <algorithm>

namespace levi {

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

std::vector<MultiIndex> increasing_multi_indices(int dim, int q) {
  std::vector<MultiIndex> out;
  if (q < 0 || q > dim) return out;
  MultiIndex J(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) J[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.push_back(J);
    int i = q - 1;
    while (i >= 0 && J[static_cast<std::size_t>(i)] == dim - q + i) --i;
    if (i < 0) break;
    ++J[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < q; ++k) J[static_cast<std::size_t>(k)] = J[static_cast<std::size_t>(k - 1)] + 1;
  }
  return out;
}

int multi_index_rank(const MultiIndex& J, int dim) {
  // Count the multi-indices that precede J lexicographically.
  const int q = static_cast<int>(J.size());
  int rank = 0;
  int prev = -1;
  for (int i = 0; i < q; ++i) {
    for (int v = prev + 1; v < J[static_cast<std::size_t>(i)]; ++v) rank += binomial(dim - v - 1, q - i - 1);
    prev = J[static_cast<std::size_t>(i)];
  }
  return rank;
}

Insertion insert_index(int k, const MultiIndex& J) {
  if (std::find(J.begin(), J.end(), k) != J.end()) return {};
  const auto below = std::count_if(J.begin(), J.end(), [k](int j) { return j < k; });
  Insertion out;
  out.sign = below % 2 == 0 ? 1 : -1;
  out.index = J;
  out.index.insert(out.index.begin() + below, k);
  return out;
}

}  // namespace levi
