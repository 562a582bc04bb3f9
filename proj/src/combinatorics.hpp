#pragma once

#include <cstddef>
#include <vector>

namespace toricgh::detail {

/// Calls fn(indices) for every increasing k-subset of {0..n-1}, in lexicographic order.
/// fn returns false to stop early.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        if (!fn(static_cast<const std::vector<std::size_t>&>(idx))) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace toricgh::detail
