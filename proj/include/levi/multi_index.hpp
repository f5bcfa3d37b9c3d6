#pragma once

#include <vector>

namespace levi {

/// Strictly increasing 0-based indices labelling a component of a (0,q)-form.
using MultiIndex = std::vector<int>;

/// All strictly increasing multi-indices of length q over {0..dim-1}, in
/// lexicographic order.
std::vector<MultiIndex> increasing_multi_indices(int dim, int q);

/// Position of J in the lexicographic list of increasing_multi_indices(dim, |J|).
int multi_index_rank(const MultiIndex& J, int dim);

/// dzbar_k ^ dzbar_J = sign * dzbar_K with K = {k} u J sorted. sign is 0 when
/// k already belongs to J, otherwise (-1)^(number of entries of J below k).
struct Insertion {
  int sign = 0;
  MultiIndex index;
};
Insertion insert_index(int k, const MultiIndex& J);

int binomial(int n, int k);

}  // namespace levi
