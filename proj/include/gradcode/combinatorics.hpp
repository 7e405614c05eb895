#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <vector>

namespace gradcode {

/// Cap on exhaustive subset sweeps. Overridable through the
/// DESIGN_GRADCODE_MAX_SUBSETS environment variable; default 10^7.
inline std::uint64_t subset_cap() {
    static const std::uint64_t cap = [] {
        if (const char* env = std::getenv("DESIGN_GRADCODE_MAX_SUBSETS")) {
            char* end = nullptr;
            unsigned long long value = std::strtoull(env, &end, 10);
            if (end != env && value > 0) return static_cast<std::uint64_t>(value);
        }
        return std::uint64_t{10'000'000};
    }();
    return cap;
}

/// C(n, k), saturating at `cap + 1` so callers can compare against a budget
/// without overflow.
inline std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // result fits: bail out as soon as the running value exceeds the cap
        if (result > cap) return cap + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / (n - k + i);
        if (result > limit) return cap + 1;
        result = result * (n - k + i) / i;
    }
    return result > cap ? cap + 1 : result;
}

/// Visits every k-subset of [0, n) in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return;
    std::vector<int> subset(k);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
        fn(const_cast<const std::vector<int>&>(subset));
        int i = k - 1;
        while (i >= 0 && subset[i] == n - k + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
}

/// Visits every non-increasing sequence of `parts` entries in [0, bound]
/// summing to `total` (integer partitions with bounded part count and size).
template <typename Fn>
void for_each_bounded_partition(int total, int parts, int bound, Fn&& fn) {
    std::vector<int> current(parts, 0);
    auto recurse = [&](auto&& self, int index, int remaining, int limit) -> void {
        if (index == parts) {
            if (remaining == 0) fn(const_cast<const std::vector<int>&>(current));
            return;
        }
        const int slots_left = parts - index;
        for (int value = std::min(limit, remaining); value >= 0; --value) {
            // prune: even `value` in every remaining slot cannot reach the total
            if (static_cast<long long>(value) * slots_left < remaining) break;
            current[index] = value;
            self(self, index + 1, remaining - value, value);
        }
        current[index] = 0;
    };
    recurse(recurse, 0, total, std::min(total, bound));
}

}  // namespace gradcode
