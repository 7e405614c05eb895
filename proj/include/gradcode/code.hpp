#pragma once

#include "gradcode/design.hpp"
#include "gradcode/errors.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gradcode {

enum class CodeKind { SymmetricBibd, DualBibd, AffineResolvable, Frc, Uncoded, Custom };

inline const char* kind_name(CodeKind kind) {
    switch (kind) {
        case CodeKind::SymmetricBibd: return "symmetric-bibd";
        case CodeKind::DualBibd: return "dual-bibd";
        case CodeKind::AffineResolvable: return "affine-resolvable";
        case CodeKind::Frc: return "frc";
        case CodeKind::Uncoded: return "uncoded";
        case CodeKind::Custom: return "custom";
    }
    return "custom";
}

/// Binary encoding matrix (parts x workers) together with its parameters:
/// workers N, parts K, per-worker load L (max column support), replication R
/// (min row support). Design-backed codes carry the pairwise-intersection
/// count lambda (symmetric/dual) or mu = L^2/K plus the worker grouping
/// (affine resolvable).
struct GradientCode {
    Eigen::MatrixXi encoding;  // K x N
    int workers = 0;           // N
    int parts = 0;             // K
    int load = 0;              // L
    int replication = 0;       // R
    CodeKind kind = CodeKind::Custom;
    long long lambda = 0;                  // symmetric / dual kinds
    long long mu = 0;                      // affine resolvable kind
    int group_size = 0;                    // frc kind
    std::vector<std::vector<int>> groups;  // affine resolvable worker groups
};

namespace detail {

inline void fill_support_counts(GradientCode& code) {
    code.workers = static_cast<int>(code.encoding.cols());
    code.parts = static_cast<int>(code.encoding.rows());
    code.load = 0;
    for (int j = 0; j < code.workers; ++j) code.load = std::max(code.load, code.encoding.col(j).sum());
    code.replication = code.parts == 0 ? 0 : code.encoding.row(0).sum();
    for (int i = 0; i < code.parts; ++i) code.replication = std::min<int>(code.replication, code.encoding.row(i).sum());
}

inline void require_exact_supports(const GradientCode& code) {
    for (int j = 0; j < code.workers; ++j) {
        if (code.encoding.col(j).sum() != code.load) throw Error("column support is not uniform");
    }
    for (int i = 0; i < code.parts; ++i) {
        if (code.encoding.row(i).sum() != code.replication) throw Error("row support is not uniform");
    }
}

}  // namespace detail

struct CodeOptions {
    bool dual = false;                        // transpose first (dual semantics)
    const Resolution* resolution = nullptr;   // worker grouping for resolvable codes
    bool force_custom = false;                // suppress kind inference
};

/// Uses the incidence matrix as the encoding matrix: N = b workers, K = v
/// parts, L = k, R = r. With dual semantics the matrix is transposed first
/// (N = v, K = b, L = r, R = k). Kind is inferred unless suppressed:
/// a supplied resolution makes the code affine resolvable, v = b makes it
/// symmetric, anything else is custom.
inline GradientCode code_from_design(const Design& design, const CodeOptions& options = {}) {
    if (!design.params) throw UnverifiedDesign("code construction requires a verified design");
    const BIBDParams& params = *design.params;

    GradientCode code;
    code.encoding = options.dual ? Eigen::MatrixXi(design.incidence.transpose()) : design.incidence;
    detail::fill_support_counts(code);
    detail::require_exact_supports(code);

    if (options.force_custom) {
        code.kind = CodeKind::Custom;
        return code;
    }

    if (options.dual) {
        code.kind = CodeKind::DualBibd;
        code.lambda = params.lambda;
        return code;
    }

    if (options.resolution) {
        if (static_cast<long long>(code.load) * code.load % code.parts != 0) {
            throw Error("resolvable code needs integral mu = L^2/K");
        }
        code.kind = CodeKind::AffineResolvable;
        code.mu = static_cast<long long>(code.load) * code.load / code.parts;
        code.groups = options.resolution->classes;
        const int per_group = code.parts / code.load;
        for (const auto& group : code.groups) {
            if (static_cast<int>(group.size()) != per_group) throw Error("parallel class has the wrong size");
            Eigen::VectorXi sum = Eigen::VectorXi::Zero(code.parts);
            for (int worker : group) sum += code.encoding.col(worker);
            if ((sum.array() != 1).any()) throw Error("parallel class does not partition the parts");
        }
        return code;
    }

    if (params.points == params.blocks) {
        code.kind = CodeKind::SymmetricBibd;
        code.lambda = params.lambda;
        return code;
    }

    code.kind = CodeKind::Custom;
    return code;
}

/// Fractional repetition code: N/L worker groups, each group replicating one
/// consecutive chunk of L parts. K = N, R = L.
inline GradientCode frc_code(int workers, int load) {
    if (load <= 0 || workers <= 0 || workers % load != 0) {
        throw Indivisible("frc needs load dividing workers");
    }
    GradientCode code;
    code.encoding = Eigen::MatrixXi::Zero(workers, workers);
    const int chunks = workers / load;
    for (int group = 0; group < chunks; ++group) {
        for (int within = 0; within < load; ++within) {
            const int worker = group * load + within;
            for (int part = group * load; part < (group + 1) * load; ++part) {
                code.encoding(part, worker) = 1;
            }
        }
    }
    detail::fill_support_counts(code);
    code.kind = CodeKind::Frc;
    code.group_size = load;
    return code;
}

/// Identity placement: one part per worker, no replication.
inline GradientCode uncoded_code(int workers) {
    if (workers < 1) throw Error("uncoded code needs at least one worker");
    GradientCode code;
    code.encoding = Eigen::MatrixXi::Identity(workers, workers);
    detail::fill_support_counts(code);
    code.kind = CodeKind::Uncoded;
    return code;
}

/// Arbitrary binary placement, decoded through the oracle only.
inline GradientCode custom_code(Eigen::MatrixXi encoding) {
    GradientCode code;
    code.encoding = std::move(encoding);
    detail::fill_support_counts(code);
    code.kind = CodeKind::Custom;
    return code;
}

/// Bipartite placement graph: workers 0..N-1 on the left, parts N..N+K-1 on
/// the right, an edge wherever the encoding matrix is nonzero.
struct PlacementGraph {
    int workers = 0;
    int gradients = 0;
    Eigen::MatrixXi adjacency;  // (N+K) x (N+K)
    long long edges = 0;
    bool biregular = false;
    int left_degree = 0;   // worker degree (L when biregular)
    int right_degree = 0;  // gradient degree (R when biregular)

    int vertices() const { return workers + gradients; }
};

inline PlacementGraph placement_graph(const GradientCode& code) {
    PlacementGraph graph;
    graph.workers = code.workers;
    graph.gradients = code.parts;
    graph.adjacency = Eigen::MatrixXi::Zero(graph.vertices(), graph.vertices());
    for (int part = 0; part < code.parts; ++part) {
        for (int worker = 0; worker < code.workers; ++worker) {
            if (code.encoding(part, worker) != 0) {
                graph.adjacency(worker, code.workers + part) = 1;
                graph.adjacency(code.workers + part, worker) = 1;
                ++graph.edges;
            }
        }
    }
    graph.left_degree = code.workers ? code.encoding.col(0).sum() : 0;
    graph.right_degree = code.parts ? code.encoding.row(0).sum() : 0;
    graph.biregular = true;
    for (int j = 0; j < code.workers; ++j) {
        if (code.encoding.col(j).sum() != graph.left_degree) graph.biregular = false;
    }
    for (int i = 0; i < code.parts; ++i) {
        if (code.encoding.row(i).sum() != graph.right_degree) graph.biregular = false;
    }
    return graph;
}

}  // namespace gradcode
