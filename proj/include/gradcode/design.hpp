#pragma once

#include "gradcode/errors.hpp"
#include "gradcode/galois.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace gradcode {

struct BIBDParams {
    int points = 0;       // v
    int blocks = 0;       // b
    int block_size = 0;   // k
    int replication = 0;  // r
    long long lambda = 0;

    bool operator==(const BIBDParams&) const = default;
};

/// Point set [0, v) plus a block family; the incidence matrix is v x b with
/// entry (i, j) = 1 iff point i lies in block j. Blocks are stored as sorted
/// index lists. Repeated blocks are allowed, empty blocks are not.
struct Design {
    int v = 0;
    std::vector<std::vector<int>> blocks;
    Eigen::MatrixXi incidence;
    std::optional<BIBDParams> params;

    int b() const { return static_cast<int>(blocks.size()); }
};

/// One parallel class per entry: block indices whose blocks partition the
/// point set; the classes partition the block set.
struct Resolution {
    std::vector<std::vector<int>> classes;
};

inline Design design_from_blocks(int v, std::vector<std::vector<int>> blocks) {
    Design design;
    design.v = v;
    for (auto& block : blocks) {
        if (block.empty()) throw Error("designs may not contain empty blocks");
        std::sort(block.begin(), block.end());
        for (int point : block) {
            if (point < 0 || point >= v) throw IndexOutOfRange("block point index out of range");
        }
    }
    design.blocks = std::move(blocks);
    design.incidence = Eigen::MatrixXi::Zero(v, design.b());
    for (int j = 0; j < design.b(); ++j) {
        for (int point : design.blocks[j]) design.incidence(point, j) = 1;
    }
    return design;
}

/// Checks uniform block size, constant replication, constant pair coverage,
/// and the two parameter identities; annotates the design on success.
inline BIBDParams verify_bibd(Design& design) {
    const int v = design.v;
    const int b = design.b();
    if (b == 0 || v == 0) throw NotUniform("design has no blocks or no points");

    const int k = static_cast<int>(design.blocks[0].size());
    for (const auto& block : design.blocks) {
        if (static_cast<int>(block.size()) != k) {
            throw NotUniform("block sizes vary: " + std::to_string(block.size()) + " vs " + std::to_string(k));
        }
    }

    std::vector<int> replication(v, 0);
    for (const auto& block : design.blocks) {
        for (int point : block) ++replication[point];
    }
    const int r = replication[0];
    for (int point = 0; point < v; ++point) {
        if (replication[point] != r) {
            throw NotUniform("point " + std::to_string(point) + " lies in " + std::to_string(replication[point]) +
                             " blocks, point 0 in " + std::to_string(r));
        }
    }

    // pair coverage, counted block by block
    std::vector<long long> pair_count(static_cast<std::size_t>(v) * v, 0);
    for (const auto& block : design.blocks) {
        for (std::size_t x = 0; x < block.size(); ++x) {
            for (std::size_t y = x + 1; y < block.size(); ++y) {
                ++pair_count[static_cast<std::size_t>(block[x]) * v + block[y]];
            }
        }
    }
    const long long lambda = v >= 2 ? pair_count[1] : 0;
    for (int x = 0; x < v; ++x) {
        for (int y = x + 1; y < v; ++y) {
            if (pair_count[static_cast<std::size_t>(x) * v + y] != lambda) {
                throw NotBalanced("pair {" + std::to_string(x) + "," + std::to_string(y) + "} lies in " +
                                  std::to_string(pair_count[static_cast<std::size_t>(x) * v + y]) +
                                  " blocks, pair {0,1} in " + std::to_string(lambda));
            }
        }
    }

    if (static_cast<long long>(v) * r != static_cast<long long>(b) * k) {
        throw NotBalanced("vr != bk");
    }
    if (static_cast<long long>(r) * (k - 1) != lambda * (v - 1)) {
        throw NotBalanced("r(k-1) != lambda(v-1)");
    }

    BIBDParams params{v, b, k, r, lambda};
    design.params = params;
    return params;
}

namespace detail {

// Lexicographic enumeration of normalized representatives of the
// one-dimensional subspaces of GF(q)^dim, as index vectors.
inline std::vector<std::vector<int>> normalized_points(const Field& field, int dim) {
    std::vector<std::vector<int>> points;
    std::vector<int> vec(dim, 0);
    // first nonzero coordinate equal to 1: choose its position, then free tail
    for (int lead = 0; lead < dim; ++lead) {
        std::fill(vec.begin(), vec.end(), 0);
        vec[lead] = 1;
        const int tail = dim - lead - 1;
        long long count = 1;
        for (int i = 0; i < tail; ++i) count *= field.order();
        for (long long idx = 0; idx < count; ++idx) {
            long long rest = idx;
            for (int i = dim - 1; i > lead; --i) {
                vec[i] = static_cast<int>(rest % field.order());
                rest /= field.order();
            }
            points.push_back(vec);
        }
    }
    std::sort(points.begin(), points.end());
    return points;
}

inline int dot_idx(const Field& field, const std::vector<int>& a, const std::vector<int>& b) {
    int acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = field.add_idx(acc, field.mul_idx(a[i], b[i]));
    return acc;
}

inline void sort_blocks(std::vector<std::vector<int>>& blocks) {
    for (auto& block : blocks) std::sort(block.begin(), block.end());
    std::sort(blocks.begin(), blocks.end());
}

}  // namespace detail

/// Projective geometry PG(m, q): points are the one-dimensional subspaces of
/// GF(q)^{m+1}, blocks the hyperplanes. Symmetric
/// ((q^{m+1}-1)/(q-1), ..., (q^{m-1}-1)/(q-1)) design.
inline Design projective_geometry(int m, int q) {
    if (m < 2) throw InvalidDimension("projective geometry needs dimension >= 2");
    const Field field(q);
    const auto points = detail::normalized_points(field, m + 1);
    const auto functionals = points;  // same normalized representatives

    std::vector<std::vector<int>> blocks;
    blocks.reserve(functionals.size());
    for (const auto& functional : functionals) {
        std::vector<int> block;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (detail::dot_idx(field, functional, points[i]) == 0) block.push_back(static_cast<int>(i));
        }
        blocks.push_back(std::move(block));
    }
    detail::sort_blocks(blocks);
    Design design = design_from_blocks(static_cast<int>(points.size()), std::move(blocks));
    verify_bibd(design);
    return design;
}

/// Affine geometry AG(m, q): points are GF(q)^m, blocks the cosets of the
/// hyperplanes through the origin. Comes with its natural resolution: one
/// parallel class per hyperplane direction (q cosets each).
inline std::pair<Design, Resolution> affine_geometry(int m, int q) {
    if (m < 2) throw InvalidDimension("affine geometry needs dimension >= 2");
    const Field field(q);

    std::vector<std::vector<int>> points;
    {
        std::vector<int> vec(m, 0);
        long long count = 1;
        for (int i = 0; i < m; ++i) count *= q;
        for (long long idx = 0; idx < count; ++idx) {
            long long rest = idx;
            for (int i = m - 1; i >= 0; --i) {
                vec[i] = static_cast<int>(rest % q);
                rest /= q;
            }
            points.push_back(vec);
        }
        std::sort(points.begin(), points.end());
    }

    const auto directions = detail::normalized_points(field, m);

    struct TaggedBlock {
        std::vector<int> block;
        int direction;
    };
    std::vector<TaggedBlock> tagged;
    for (std::size_t dir = 0; dir < directions.size(); ++dir) {
        std::vector<std::vector<int>> cosets(q);
        for (std::size_t i = 0; i < points.size(); ++i) {
            cosets[detail::dot_idx(field, directions[dir], points[i])].push_back(static_cast<int>(i));
        }
        for (auto& coset : cosets) tagged.push_back({std::move(coset), static_cast<int>(dir)});
    }
    std::sort(tagged.begin(), tagged.end(),
              [](const TaggedBlock& a, const TaggedBlock& b) { return a.block < b.block; });

    std::vector<std::vector<int>> blocks;
    Resolution resolution;
    resolution.classes.resize(directions.size());
    for (std::size_t j = 0; j < tagged.size(); ++j) {
        blocks.push_back(tagged[j].block);
        resolution.classes[tagged[j].direction].push_back(static_cast<int>(j));
    }

    Design design = design_from_blocks(static_cast<int>(points.size()), std::move(blocks));
    verify_bibd(design);
    return {std::move(design), std::move(resolution)};
}

/// Paley construction: for 4m-1 a prime power congruent to 3 mod 4, the
/// translates of the quadratic-residue set form a symmetric
/// (4m-1, 4m-1, 2m-1, 2m-1, m-1) design.
inline Design hadamard_design(int m) {
    const int n = 4 * m - 1;
    if (m < 2) throw UnsupportedOrder("hadamard design needs m >= 2");
    // 4m-1 is always 3 mod 4, so prime-power order is the only constraint
    std::optional<Field> field;
    try {
        field.emplace(n);
    } catch (const NotPrimePower&) {
        throw UnsupportedOrder(std::to_string(n) + " is not a prime power");
    }

    std::vector<int> residues;
    {
        std::vector<char> seen(n, 0);
        for (int x = 1; x < n; ++x) {
            const int square = field->mul_idx(x, x);
            if (!seen[square]) { seen[square] = 1; residues.push_back(square); }
        }
        std::sort(residues.begin(), residues.end());
    }

    std::vector<std::vector<int>> blocks;
    blocks.reserve(n);
    for (int shift = 0; shift < n; ++shift) {
        std::vector<int> block;
        block.reserve(residues.size());
        for (int residue : residues) block.push_back(field->add_idx(residue, shift));
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }
    std::sort(blocks.begin(), blocks.end());

    Design design = design_from_blocks(n, std::move(blocks));
    verify_bibd(design);
    return design;
}

/// Transposes the incidence matrix. Point and block labels carry over from
/// the input's block and point order; nothing is re-sorted, so dual(dual(d))
/// reproduces d exactly. The output is not verified (duals of non-symmetric
/// designs are generally not balanced).
inline Design dual(const Design& design) {
    Design out;
    out.v = design.b();
    out.incidence = design.incidence.transpose();
    out.blocks.resize(design.v);
    for (int y = 0; y < design.v; ++y) {
        for (int x = 0; x < design.b(); ++x) {
            if (design.incidence(y, x) != 0) out.blocks[y].push_back(x);
        }
    }
    try {
        verify_bibd(out);
    } catch (const Error&) {
        out.params.reset();
    }
    return out;
}

namespace detail {

inline void require_symmetric(const Design& design, int block_index) {
    if (!design.params) throw UnverifiedDesign("input design is not verified");
    if (design.params->points != design.params->blocks) throw NotSymmetric("input design is not symmetric");
    if (block_index < 0 || block_index >= design.b()) throw IndexOutOfRange("block index out of range");
}

}  // namespace detail

/// Derived design of a symmetric design at block A0: points are A0, blocks
/// the intersections A ∩ A0 over the remaining blocks.
inline Design derived_design(const Design& design, int block_index) {
    detail::require_symmetric(design, block_index);
    const auto& base = design.blocks[block_index];
    std::vector<int> point_id(design.v, -1);
    for (std::size_t i = 0; i < base.size(); ++i) point_id[base[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> blocks;
    for (int j = 0; j < design.b(); ++j) {
        if (j == block_index) continue;
        std::vector<int> block;
        for (int point : design.blocks[j]) {
            if (point_id[point] >= 0) block.push_back(point_id[point]);
        }
        blocks.push_back(std::move(block));
    }
    detail::sort_blocks(blocks);
    Design out = design_from_blocks(static_cast<int>(base.size()), std::move(blocks));
    verify_bibd(out);
    return out;
}

/// Residual design of a symmetric design at block A0: points are the
/// complement of A0, blocks the differences A \ A0.
inline Design residual_design(const Design& design, int block_index) {
    detail::require_symmetric(design, block_index);
    const auto& base = design.blocks[block_index];
    std::vector<int> point_id(design.v, -1);
    {
        std::vector<char> in_base(design.v, 0);
        for (int point : base) in_base[point] = 1;
        int next = 0;
        for (int point = 0; point < design.v; ++point) {
            if (!in_base[point]) point_id[point] = next++;
        }
    }

    std::vector<std::vector<int>> blocks;
    for (int j = 0; j < design.b(); ++j) {
        if (j == block_index) continue;
        std::vector<int> block;
        for (int point : design.blocks[j]) {
            if (point_id[point] >= 0) block.push_back(point_id[point]);
        }
        blocks.push_back(std::move(block));
    }
    detail::sort_blocks(blocks);
    Design out = design_from_blocks(design.v - static_cast<int>(base.size()), std::move(blocks));
    verify_bibd(out);
    return out;
}

enum class DerivedMode { Derived, Residual };

inline Design derive_or_residual(const Design& design, int block_index, DerivedMode mode) {
    return mode == DerivedMode::Derived ? derived_design(design, block_index)
                                        : residual_design(design, block_index);
}

}  // namespace gradcode
