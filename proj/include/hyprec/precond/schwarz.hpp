#pragma once

#include <array>
#include <memory>
#include <vector>

#include "hyprec/fem/mesh.hpp"
#include "hyprec/linalg/lu.hpp"
#include "hyprec/precond/preconditioner.hpp"

namespace hyprec {

/// Domain decomposition of the mesh nodes. `nonoverlapping` sets are
/// pairwise disjoint and cover every node; `overlapping[s]` contains
/// `nonoverlapping[s]` grown by `overlap` layers of mesh adjacency.
struct Partition {
    std::vector<std::vector<Index>> overlapping;
    std::vector<std::vector<Index>> nonoverlapping;
    std::size_t overlap = 0;
    std::array<Index, 3> blocks_per_axis{1, 1, 1};

    std::size_t size() const { return nonoverlapping.size(); }
};

/// Axis-aligned block partition into `subdomains` = product of per-axis
/// block counts (the most balanced factorization is chosen). Throws
/// std::invalid_argument when no factorization fits the mesh.
Partition partition_structured(const fem::StructuredMesh& mesh, std::size_t subdomains,
                               std::size_t overlap);

/// Grows each set by `layers` rings of the adjacency graph.
std::vector<std::vector<Index>> grow_overlap(const std::vector<std::vector<Index>>& sets,
                                             const std::vector<std::vector<Index>>& adjacency,
                                             std::size_t layers);

/// Checks the cover, disjointness and containment invariants.
void validate_partition(const Partition& p, std::size_t num_nodes);

/// One-level additive Schwarz: z = sum_s R_s^T A_s^{-1} R_s r with dense
/// LU on every overlapping block.
class AdditiveSchwarz {
public:
    /// Throws SingularMatrixError naming the subdomain whose block is singular.
    /// `spd` is the flag the resulting preconditioner advertises; it holds
    /// when A is SPD.
    AdditiveSchwarz(std::shared_ptr<const CsrMatrix> a, const Partition& partition,
                    bool spd = true);

    Vector apply(std::span<const double> r) const;
    std::size_t num_subdomains() const { return blocks_.size(); }
    Preconditioner as_preconditioner() const;

private:
    struct Block {
        std::vector<Index> dofs;
        LuFactorization lu;
    };
    std::size_t n_ = 0;
    bool spd_ = true;
    std::vector<Block> blocks_;
};

Preconditioner make_asm(std::shared_ptr<const CsrMatrix> a, const Partition& partition,
                        bool spd = true);

} // namespace hyprec
