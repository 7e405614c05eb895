#pragma once

#include "gradcode/code.hpp"
#include "gradcode/combinatorics.hpp"
#include "gradcode/errors.hpp"
#include "gradcode/linalg.hpp"
#include "gradcode/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gradcode {

/// Partition of the workers into stragglers and survivors. The survivor list
/// is kept sorted; decoding vectors are indexed against it.
struct StragglerScenario {
    int workers = 0;
    std::vector<int> stragglers;
    std::vector<int> survivors;

    int straggler_count() const { return static_cast<int>(stragglers.size()); }

    static StragglerScenario from_stragglers(int workers, std::vector<int> stragglers) {
        std::sort(stragglers.begin(), stragglers.end());
        StragglerScenario scenario;
        scenario.workers = workers;
        std::vector<char> straggling(workers, 0);
        for (int worker : stragglers) {
            if (worker < 0 || worker >= workers) throw IndexOutOfRange("straggler index out of range");
            if (straggling[worker]) throw Error("duplicate straggler index");
            straggling[worker] = 1;
        }
        if (static_cast<int>(stragglers.size()) >= workers && workers > 0) {
            throw Error("at least one worker must survive");
        }
        scenario.stragglers = std::move(stragglers);
        for (int worker = 0; worker < workers; ++worker) {
            if (!straggling[worker]) scenario.survivors.push_back(worker);
        }
        return scenario;
    }
};

enum class DecodeMethod { OracleExact, OracleFloat, Thm1, Thm2, Thm3Case1, Thm3Case2 };

inline const char* method_name(DecodeMethod method) {
    switch (method) {
        case DecodeMethod::OracleExact: return "oracle-exact";
        case DecodeMethod::OracleFloat: return "oracle-float";
        case DecodeMethod::Thm1: return "thm1";
        case DecodeMethod::Thm2: return "thm2";
        case DecodeMethod::Thm3Case1: return "thm3-case1";
        case DecodeMethod::Thm3Case2: return "thm3-case2";
    }
    return "oracle-float";
}

/// Decoding vector (aligned with the sorted survivor list) and the squared
/// residual of the best linear combination against the all-ones target.
struct DecodeResult {
    Eigen::VectorXd v;         // always populated
    std::vector<Rat> v_exact;  // nonempty iff exact
    double err = 0.0;
    Rat err_exact = 0;
    bool exact = false;
    DecodeMethod method = DecodeMethod::OracleFloat;
};

namespace detail {

inline bool integer_valued(const Eigen::MatrixXd& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (m(i, j) != std::floor(m(i, j))) return false;
        }
    }
    return true;
}

inline DecodeResult oracle_decode_exact(const Eigen::MatrixXd& surviving, int parts) {
    const int cols = static_cast<int>(surviving.cols());
    RatMatrix normal(cols, RatVector(cols, Rat(0)));
    RatVector rhs(cols, Rat(0));
    for (int a = 0; a < cols; ++a) {
        for (int b = a; b < cols; ++b) {
            long long dot = 0;
            for (int i = 0; i < parts; ++i) {
                dot += static_cast<long long>(surviving(i, a)) * static_cast<long long>(surviving(i, b));
            }
            normal[a][b] = dot;
            normal[b][a] = dot;
        }
        long long column_sum = 0;
        for (int i = 0; i < parts; ++i) column_sum += static_cast<long long>(surviving(i, a));
        rhs[a] = column_sum;
    }

    DecodeResult result;
    result.v_exact = solve_normal_min_norm(normal, rhs);
    result.exact = true;
    result.method = DecodeMethod::OracleExact;

    // err = K - 2 v'c + v'Av, all exact
    Rat err = parts;
    for (int a = 0; a < cols; ++a) err -= 2 * result.v_exact[a] * rhs[a];
    const RatVector av = mat_vec(normal, result.v_exact);
    for (int a = 0; a < cols; ++a) err += result.v_exact[a] * av[a];
    result.err_exact = err;
    result.err = to_double(err);
    result.v.resize(cols);
    for (int a = 0; a < cols; ++a) result.v(a) = to_double(result.v_exact[a]);
    return result;
}

inline DecodeResult oracle_decode_float(const Eigen::MatrixXd& surviving, int parts) {
    DecodeResult result;
    const Eigen::VectorXd target = Eigen::VectorXd::Ones(parts);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(surviving);
    result.v = cod.solve(target);
    result.err = (surviving * result.v - target).squaredNorm();
    result.exact = false;
    result.method = DecodeMethod::OracleFloat;
    return result;
}

}  // namespace detail

/// Least-squares oracle: minimizes the squared residual of
/// sum_j v_j * column_j against the all-ones target over the surviving
/// columns. Integer-valued matrices with at most 64 workers go through exact
/// rational elimination on the normal equations (minimum-norm solution when
/// singular); everything else uses a rank-revealing orthogonal factorization.
inline DecodeResult oracle_decode(const Eigen::MatrixXd& encoding, const StragglerScenario& scenario) {
    const int parts = static_cast<int>(encoding.rows());
    Eigen::MatrixXd surviving(parts, scenario.survivors.size());
    for (std::size_t idx = 0; idx < scenario.survivors.size(); ++idx) {
        surviving.col(static_cast<int>(idx)) = encoding.col(scenario.survivors[idx]);
    }
    if (encoding.cols() <= 64 && detail::integer_valued(encoding)) {
        return detail::oracle_decode_exact(surviving, parts);
    }
    return detail::oracle_decode_float(surviving, parts);
}

inline DecodeResult oracle_decode(const GradientCode& code, const StragglerScenario& scenario) {
    return oracle_decode(code.encoding.cast<double>(), scenario);
}

namespace detail {

// Shared closed form for codes whose surviving columns pairwise intersect in
// exactly lambda positions: constant decoding weight L/(L + lambda(N-S-1))
// and error K - L^2 (N-S) / (L + lambda(N-S-1)).
inline DecodeResult decode_constant_intersection(const GradientCode& code,
                                                 const StragglerScenario& scenario,
                                                 DecodeMethod method) {
    const int surviving = code.workers - scenario.straggler_count();
    const Rat denom = code.load + Rat(code.lambda) * (surviving - 1);
    const Rat weight = Rat(code.load) / denom;

    DecodeResult result;
    result.exact = true;
    result.method = method;
    result.v_exact.assign(surviving, weight);
    result.err_exact = Rat(code.parts) - Rat(code.load) * code.load * surviving / denom;
    result.err = to_double(result.err_exact);
    result.v = Eigen::VectorXd::Constant(surviving, to_double(weight));
    return result;
}

}  // namespace detail

/// Closed-form decoder for symmetric-design codes.
inline DecodeResult decode_symmetric(const GradientCode& code, const StragglerScenario& scenario) {
    if (code.kind != CodeKind::SymmetricBibd) throw WrongKind("decode_symmetric needs a symmetric-bibd code");
    return detail::decode_constant_intersection(code, scenario, DecodeMethod::Thm1);
}

/// Closed-form decoder for dual-design codes; same formulas with the dual's
/// parameters.
inline DecodeResult decode_dual(const GradientCode& code, const StragglerScenario& scenario) {
    if (code.kind != CodeKind::DualBibd) throw WrongKind("decode_dual needs a dual-bibd code");
    return detail::decode_constant_intersection(code, scenario, DecodeMethod::Thm2);
}

/// Per-group straggler counts for a resolvable code.
struct StragglerProfile {
    std::vector<int> counts;
    int total = 0;
};

inline StragglerProfile straggler_profile(const GradientCode& code, const StragglerScenario& scenario) {
    if (code.kind != CodeKind::AffineResolvable) throw WrongKind("straggler profiles need an affine-resolvable code");
    std::vector<char> straggling(code.workers, 0);
    for (int worker : scenario.stragglers) straggling[worker] = 1;
    StragglerProfile profile;
    profile.counts.reserve(code.groups.size());
    for (const auto& group : code.groups) {
        int count = 0;
        for (int worker : group) count += straggling[worker];
        profile.counts.push_back(count);
        profile.total += count;
    }
    return profile;
}

namespace detail {

struct ResolvableWeights {
    std::vector<Rat> per_group;  // decoding weight for each group's survivors
    Rat err;
    bool complete_group;   // some group fully survives
    int complete_index = -1;
};

// Group weights and error for a straggler profile. With a fully surviving
// group the indicator of that group is optimal and the error is zero.
// Otherwise weight c_i = (L / (L - mu n_i)) / (1 + sum_p mu n_p / (L - mu n_p))
// with n_i surviving workers in group i, and
// err = K + sum_i L n_i c_i (c_i - 2) + sum_{i != j} mu n_i n_j c_i c_j.
inline ResolvableWeights resolvable_weights(const GradientCode& code, const std::vector<int>& counts) {
    const int group_size = code.parts / code.load;
    ResolvableWeights weights;
    weights.complete_group = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) {
            weights.complete_group = true;
            weights.complete_index = static_cast<int>(i);
            weights.err = 0;
            return weights;
        }
    }

    const int groups = static_cast<int>(counts.size());
    std::vector<int> surviving(groups);
    for (int i = 0; i < groups; ++i) surviving[i] = group_size - counts[i];

    Rat denom = 1;
    for (int i = 0; i < groups; ++i) {
        denom += Rat(code.mu * surviving[i]) / (code.load - code.mu * surviving[i]);
    }
    weights.per_group.resize(groups);
    for (int i = 0; i < groups; ++i) {
        weights.per_group[i] = Rat(code.load) / (code.load - code.mu * surviving[i]) / denom;
    }

    // the cross-group sum collapses to (sum n c)^2 - sum n^2 c^2
    Rat err = code.parts;
    Rat weighted_sum = 0;
    for (int i = 0; i < groups; ++i) {
        const Rat& c = weights.per_group[i];
        err += Rat(code.load) * surviving[i] * c * (c - 2);
        err -= Rat(code.mu) * surviving[i] * surviving[i] * c * c;
        weighted_sum += Rat(surviving[i]) * c;
    }
    err += Rat(code.mu) * weighted_sum * weighted_sum;
    weights.err = err;
    return weights;
}

// Same error expression in floating point; used to pre-screen the profile
// search before exact confirmation.
inline double resolvable_err_double(const GradientCode& code, const std::vector<int>& counts) {
    const int group_size = code.parts / code.load;
    const int groups = static_cast<int>(counts.size());
    const double load = code.load;
    const double mu = static_cast<double>(code.mu);
    double denom = 1.0;
    for (int i = 0; i < groups; ++i) {
        if (counts[i] == 0) return 0.0;
        const double surviving = group_size - counts[i];
        denom += mu * surviving / (load - mu * surviving);
    }
    double err = code.parts;
    double weighted_sum = 0.0;
    for (int i = 0; i < groups; ++i) {
        const double surviving = group_size - counts[i];
        const double c = load / (load - mu * surviving) / denom;
        err += load * surviving * c * (c - 2.0);
        err -= mu * surviving * surviving * c * c;
        weighted_sum += surviving * c;
    }
    return err + mu * weighted_sum * weighted_sum;
}

}  // namespace detail

/// Closed-form decoder for affine resolvable codes. When at least one worker
/// group fully survives, the lowest-indexed such group is summed directly and
/// the error is zero; otherwise each group's survivors share a constant
/// weight.
inline DecodeResult decode_resolvable(const GradientCode& code, const StragglerScenario& scenario) {
    if (code.kind != CodeKind::AffineResolvable) throw WrongKind("decode_resolvable needs an affine-resolvable code");
    const StragglerProfile profile = straggler_profile(code, scenario);
    const detail::ResolvableWeights weights = detail::resolvable_weights(code, profile.counts);

    std::vector<int> group_of(code.workers, -1);
    for (std::size_t g = 0; g < code.groups.size(); ++g) {
        for (int worker : code.groups[g]) group_of[worker] = static_cast<int>(g);
    }

    DecodeResult result;
    result.exact = true;
    const int surviving = static_cast<int>(scenario.survivors.size());
    result.v_exact.resize(surviving);
    if (weights.complete_group) {
        result.method = DecodeMethod::Thm3Case1;
        for (int idx = 0; idx < surviving; ++idx) {
            result.v_exact[idx] = group_of[scenario.survivors[idx]] == weights.complete_index ? 1 : 0;
        }
        result.err_exact = 0;
    } else {
        result.method = DecodeMethod::Thm3Case2;
        for (int idx = 0; idx < surviving; ++idx) {
            result.v_exact[idx] = weights.per_group[group_of[scenario.survivors[idx]]];
        }
        result.err_exact = weights.err;
    }
    result.err = to_double(result.err_exact);
    result.v.resize(surviving);
    for (int idx = 0; idx < surviving; ++idx) result.v(idx) = to_double(result.v_exact[idx]);
    return result;
}

/// Dispatches to the matching closed form, or to the oracle for kinds without
/// one.
inline DecodeResult decode_auto(const GradientCode& code, const StragglerScenario& scenario) {
    switch (code.kind) {
        case CodeKind::SymmetricBibd: return decode_symmetric(code, scenario);
        case CodeKind::DualBibd: return decode_dual(code, scenario);
        case CodeKind::AffineResolvable: return decode_resolvable(code, scenario);
        default: return oracle_decode(code, scenario);
    }
}

enum class WorstCaseMethod { ClosedForm, Exhaustive };

struct WorstCase {
    Rat err_exact = 0;
    double err = 0.0;
    bool exact = false;
    std::optional<std::vector<int>> witness;  // straggler set attaining the maximum
    std::optional<std::vector<int>> profile;  // resolvable codes: maximizing profile
};

/// Worst-case error over all straggler sets of the given size. Closed form:
/// the pairwise-intersection formula for symmetric/dual codes (set-independent),
/// or a maximization over straggler profiles for resolvable codes. Exhaustive:
/// oracle error maximized over every straggler set (lexicographically first
/// witness), guarded by the subset cap.
inline WorstCase worst_case_error(const GradientCode& code, int stragglers, WorstCaseMethod method,
                                  std::uint64_t cap = subset_cap()) {
    if (stragglers < 0 || stragglers >= code.workers) throw IndexOutOfRange("straggler count out of range");
    WorstCase result;

    if (method == WorstCaseMethod::ClosedForm) {
        switch (code.kind) {
            case CodeKind::SymmetricBibd:
            case CodeKind::DualBibd: {
                const Rat denom = code.load + Rat(code.lambda) * (code.workers - stragglers - 1);
                result.err_exact = Rat(code.parts) - Rat(code.load) * code.load * (code.workers - stragglers) / denom;
                result.err = to_double(result.err_exact);
                result.exact = true;
                return result;
            }
            case CodeKind::AffineResolvable: {
                const int group_size = code.parts / code.load;
                const int groups = static_cast<int>(code.groups.size());
                // float pre-screen over all profiles, exact comparison of the near-ties
                double best_screen = -1.0;
                for_each_bounded_partition(stragglers, groups, group_size, [&](const std::vector<int>& profile) {
                    best_screen = std::max(best_screen, detail::resolvable_err_double(code, profile));
                });
                if (best_screen < 0.0) throw Error("no straggler profile with the requested size");
                const double screen_floor = best_screen - 1e-6 * (1.0 + std::abs(best_screen));
                bool found = false;
                std::vector<int> best_profile;
                Rat best_err = 0;
                for_each_bounded_partition(stragglers, groups, group_size, [&](const std::vector<int>& profile) {
                    if (detail::resolvable_err_double(code, profile) < screen_floor) return;
                    const Rat err = detail::resolvable_weights(code, profile).err;
                    if (!found || err > best_err) {
                        found = true;
                        best_err = err;
                        best_profile = profile;
                    }
                });
                result.err_exact = best_err;
                result.err = to_double(best_err);
                result.exact = true;
                result.profile = best_profile;
                // realize the profile on concrete workers: straggle the first
                // s_i workers of each group
                std::vector<int> witness;
                for (int g = 0; g < groups; ++g) {
                    for (int i = 0; i < best_profile[g]; ++i) witness.push_back(code.groups[g][i]);
                }
                std::sort(witness.begin(), witness.end());
                result.witness = std::move(witness);
                return result;
            }
            default:
                throw MethodUnavailable("no closed-form worst case for this code kind");
        }
    }

    if (binomial_capped(code.workers, stragglers, cap) > cap) {
        throw TooLarge("exhaustive straggler sweep exceeds the subset cap");
    }
    bool found = false;
    const Eigen::MatrixXd encoding = code.encoding.cast<double>();
    for_each_combination(code.workers, stragglers, [&](const std::vector<int>& subset) {
        const DecodeResult decoded = oracle_decode(encoding, StragglerScenario::from_stragglers(code.workers, subset));
        const bool better = !found || (decoded.exact && result.exact ? decoded.err_exact > result.err_exact
                                                                     : decoded.err > result.err);
        if (better) {
            found = true;
            result.err_exact = decoded.err_exact;
            result.err = decoded.err;
            result.exact = decoded.exact;
            result.witness = subset;
        }
    });
    return result;
}

/// Closed-form worst case for the order-q projective-plane code:
/// S / ((q+1) + (q+1-S)/q), exactly Sq / (q^2 + 2q + 1 - S).
inline Rat pg_error_formula(int q, int stragglers) {
    const long long workers = static_cast<long long>(q) * q + q + 1;
    if (stragglers < 0 || stragglers >= workers) throw IndexOutOfRange("straggler count out of range");
    return Rat(static_cast<long long>(stragglers) * q) /
           Rat(static_cast<long long>(q) * q + 2 * q + 1 - stragglers);
}

/// Inverse of G + H from the inverse of G, for rank-one H:
/// (G+H)^-1 = G^-1 - G^-1 H G^-1 / (1 + tr(H G^-1)).
inline Eigen::MatrixXd rank_one_update_inverse(const Eigen::MatrixXd& g_inverse, const Eigen::MatrixXd& update) {
    const double trace = (update * g_inverse).trace();
    if (std::abs(1.0 + trace) <= 1e-12 * std::max(1.0, std::abs(trace))) {
        throw SingularUpdate("trace(H G^-1) = -1: updated matrix is singular");
    }
    return g_inverse - (g_inverse * update * g_inverse) / (1.0 + trace);
}

}  // namespace gradcode
