#pragma once

#include "gradcode/code.hpp"
#include "gradcode/combinatorics.hpp"
#include "gradcode/decode.hpp"
#include "gradcode/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace gradcode {

namespace detail {

// SplitMix64; fixed constants keep seeded draws identical across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Uniformly random straggler set of the requested size via a seeded partial
/// Fisher-Yates shuffle. Same seed, same set, on every platform.
inline StragglerScenario random_stragglers(int workers, int count, std::uint64_t seed) {
    if (count < 0 || count >= workers) throw IndexOutOfRange("straggler count out of range");
    std::vector<int> order(workers);
    for (int i = 0; i < workers; ++i) order[i] = i;
    std::uint64_t state = seed;
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(detail::splitmix64(state) % static_cast<std::uint64_t>(workers - i));
        std::swap(order[i], order[j]);
    }
    return StragglerScenario::from_stragglers(workers, std::vector<int>(order.begin(), order.begin() + count));
}

struct GreedyAttack {
    StragglerScenario scenario;
    std::vector<int> wiped;  // parts left with zero surviving coverage
};

/// Budgeted min-cover-first adversary: repeatedly wipe the part whose set of
/// still-alive covering workers is smallest, straggling that whole set, until
/// no part's cover fits the remaining budget. For an N = K code this wipes at
/// least floor(budget / L) parts.
inline GreedyAttack greedy_adversary(const GradientCode& code, int budget) {
    if (budget < 0 || budget >= code.workers) throw IndexOutOfRange("straggler budget out of range");
    std::vector<char> straggling(code.workers, 0);
    std::vector<char> wiped(code.parts, 0);
    GreedyAttack attack;
    int remaining = budget;

    while (true) {
        int best_part = -1;
        std::size_t best_cover = 0;
        std::vector<int> best_workers;
        for (int part = 0; part < code.parts; ++part) {
            if (wiped[part]) continue;
            std::vector<int> cover;
            for (int worker = 0; worker < code.workers; ++worker) {
                if (code.encoding(part, worker) != 0 && !straggling[worker]) cover.push_back(worker);
            }
            if (cover.empty()) {
                // already uncovered by earlier picks; wipe for free
                wiped[part] = 1;
                attack.wiped.push_back(part);
                best_part = -2;
                break;
            }
            if (best_part < 0 || cover.size() < best_cover) {
                best_part = part;
                best_cover = cover.size();
                best_workers = std::move(cover);
            }
        }
        if (best_part == -2) continue;  // rescan after a free wipe
        if (best_part < 0 || static_cast<int>(best_cover) > remaining) break;
        for (int worker : best_workers) straggling[worker] = 1;
        remaining -= static_cast<int>(best_cover);
        wiped[best_part] = 1;
        attack.wiped.push_back(best_part);
    }

    std::vector<int> stragglers;
    for (int worker = 0; worker < code.workers; ++worker) {
        if (straggling[worker]) stragglers.push_back(worker);
    }
    std::sort(attack.wiped.begin(), attack.wiped.end());
    attack.scenario = StragglerScenario::from_stragglers(code.workers, std::move(stragglers));
    return attack;
}

/// Greedy attack padded with the lowest-index surviving workers so the whole
/// budget is spent; a superset of stragglers never decreases the error.
inline StragglerScenario greedy_scenario_with_budget(const GradientCode& code, int budget) {
    std::vector<int> chosen = greedy_adversary(code, budget).scenario.stragglers;
    std::vector<char> straggling(code.workers, 0);
    for (int worker : chosen) straggling[worker] = 1;
    for (int worker = 0; worker < code.workers && static_cast<int>(chosen.size()) < budget; ++worker) {
        if (!straggling[worker]) chosen.push_back(worker);
    }
    return StragglerScenario::from_stragglers(code.workers, std::move(chosen));
}

inline int component_count(const PlacementGraph& graph) {
    const int n = graph.vertices();
    std::vector<int> component(n, -1);
    int count = 0;
    std::vector<int> stack;
    for (int start = 0; start < n; ++start) {
        if (component[start] >= 0) continue;
        stack.push_back(start);
        component[start] = count;
        while (!stack.empty()) {
            const int vertex = stack.back();
            stack.pop_back();
            for (int other = 0; other < n; ++other) {
                if (graph.adjacency(vertex, other) != 0 && component[other] < 0) {
                    component[other] = count;
                    stack.push_back(other);
                }
            }
        }
        ++count;
    }
    return count;
}

/// Exhaustive isoperimetric constant: min over nonempty proper vertex subsets
/// of boundary-edge count over min(|F|, |V \ F|). Exponential; capped at 20
/// vertices.
inline double expansion_constant(const PlacementGraph& graph) {
    const int n = graph.vertices();
    if (n > 20) throw TooLarge("expansion constant is exhaustive; at most 20 vertices");
    if (n < 2) throw Error("expansion constant needs at least two vertices");
    std::vector<std::uint32_t> neighbor_mask(n, 0);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (graph.adjacency(a, b) != 0) neighbor_mask[a] |= (1u << b);
        }
    }
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t all = (1u << n) - 1;
    for (std::uint32_t subset = 1; subset < all; ++subset) {
        int boundary = 0;
        for (int vertex = 0; vertex < n; ++vertex) {
            if (subset & (1u << vertex)) boundary += __builtin_popcount(neighbor_mask[vertex] & ~subset);
        }
        const int size = __builtin_popcount(subset);
        best = std::min(best, static_cast<double>(boundary) / std::min(size, n - size));
    }

    // cross-check against the spectral sandwich on regular connected graphs
    bool regular = true;
    const int degree = __builtin_popcount(neighbor_mask[0]);
    for (int vertex = 1; vertex < n; ++vertex) {
        if (__builtin_popcount(neighbor_mask[vertex]) != degree) regular = false;
    }
    if (regular && component_count(graph) == 1) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.adjacency.cast<double>());
        const double lambda2 = solver.eigenvalues()(n - 2);
        const double gap = degree - lambda2;
        if (best < gap / 2.0 - 1e-9 || best > std::sqrt(2.0 * degree * gap) + 1e-9) {
            throw Error("expansion constant escaped its spectral sandwich");
        }
    }
    return best;
}

/// Full dense spectrum of the bipartite adjacency matrix plus the derived
/// quantities: top two eigenvalues, the degree-based second-eigenvalue bound
/// sqrt((|E| - L R)/(|E|/L - 1)) for biregular graphs, connectivity, and (for
/// graphs small enough) the exhaustive expansion constant.
struct SpectralSummary {
    Eigen::VectorXd eigenvalues;  // descending
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    long long edges = 0;
    bool biregular = false;
    int left_degree = 0;
    int right_degree = 0;
    bool connected = false;
    int components = 0;
    std::optional<double> hoholdt_bound;
    std::optional<double> expansion;
};

inline SpectralSummary spectral_summary(const PlacementGraph& graph) {
    SpectralSummary summary;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.adjacency.cast<double>());
    summary.eigenvalues = solver.eigenvalues().reverse();
    summary.lambda1 = summary.eigenvalues(0);
    summary.lambda2 = summary.eigenvalues.size() > 1 ? summary.eigenvalues(1) : summary.lambda1;
    summary.edges = graph.edges;
    summary.biregular = graph.biregular;
    summary.left_degree = graph.left_degree;
    summary.right_degree = graph.right_degree;
    summary.components = component_count(graph);
    summary.connected = summary.components == 1;
    if (graph.biregular && graph.edges > graph.left_degree) {
        const double numerator = static_cast<double>(graph.edges) -
                                 static_cast<double>(graph.left_degree) * graph.right_degree;
        const double denominator = static_cast<double>(graph.edges) / graph.left_degree - 1.0;
        summary.hoholdt_bound = std::sqrt(numerator / denominator);
    }
    if (graph.vertices() <= 20) summary.expansion = expansion_constant(graph);
    return summary;
}

/// Exhaustive adversarial threshold: over all eta-subsets of the parts, the
/// smallest worker neighborhood (straggling it zeroes the whole subset's
/// coverage). Reports the spectral lower bound when the code qualifies.
struct ThresholdReport {
    int eta = 0;
    int s_star = 0;
    std::optional<double> s_star_lb;
    std::optional<double> lambda2;
    std::vector<int> witness_gradients;
    std::vector<int> witness_workers;
};

/// Spectral lower bound (3L - lambda2)/(L + lambda2) * eta. Requires N = K, a
/// regular connected placement graph, and eta <= N/4.
inline double threshold_lower_bound(const GradientCode& code, int eta, const SpectralSummary& summary) {
    if (code.workers != code.parts) throw NotInClassC("bound requires as many workers as parts");
    if (!summary.biregular || summary.left_degree != summary.right_degree) {
        throw NotInClassC("bound requires a regular placement graph");
    }
    if (!summary.connected) throw NotInClassC("bound requires a connected placement graph");
    if (eta < 1) throw IndexOutOfRange("eta must be positive");
    if (4 * eta > code.workers) throw EtaTooLarge("bound requires eta <= N/4");
    const double load = summary.left_degree;
    return (3.0 * load - summary.lambda2) / (load + summary.lambda2) * eta;
}

inline double threshold_lower_bound(const GradientCode& code, int eta) {
    return threshold_lower_bound(code, eta, spectral_summary(placement_graph(code)));
}

inline ThresholdReport adversarial_threshold(const GradientCode& code, int eta,
                                             std::uint64_t cap = subset_cap()) {
    if (eta < 1 || eta >= code.parts) throw IndexOutOfRange("eta must lie in [1, K)");
    if (binomial_capped(code.parts, eta, cap) > cap) {
        throw TooLarge("exhaustive threshold search exceeds the subset cap");
    }

    std::vector<std::uint64_t> cover(code.parts, 0);
    if (code.workers > 64) throw TooLarge("threshold search supports at most 64 workers");
    for (int part = 0; part < code.parts; ++part) {
        for (int worker = 0; worker < code.workers; ++worker) {
            if (code.encoding(part, worker) != 0) cover[part] |= (std::uint64_t{1} << worker);
        }
    }

    ThresholdReport report;
    report.eta = eta;
    int best = code.workers + 1;
    for_each_combination(code.parts, eta, [&](const std::vector<int>& subset) {
        std::uint64_t neighborhood = 0;
        for (int part : subset) neighborhood |= cover[part];
        const int size = __builtin_popcountll(neighborhood);
        if (size < best) {
            best = size;
            report.witness_gradients = subset;
        }
    });
    report.s_star = best;

    std::uint64_t neighborhood = 0;
    for (int part : report.witness_gradients) neighborhood |= cover[part];
    for (int worker = 0; worker < code.workers; ++worker) {
        if (neighborhood & (std::uint64_t{1} << worker)) report.witness_workers.push_back(worker);
    }

    const SpectralSummary summary = spectral_summary(placement_graph(code));
    report.lambda2 = summary.lambda2;
    try {
        report.s_star_lb = threshold_lower_bound(code, eta, summary);
    } catch (const Error&) {
        report.s_star_lb.reset();
    }
    return report;
}

}  // namespace gradcode
