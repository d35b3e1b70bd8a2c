#include "hyprec/precond/schwarz.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace hyprec {

namespace {

// Per-axis block counts with product `s` and each count <= nodes per axis;
// the most balanced choice wins, ties go to the lexicographically largest.
std::array<Index, 3> factor_blocks(std::size_t s, int dim, Index nodes) {
    std::array<Index, 3> best{0, 1, 1};
    double best_ratio = std::numeric_limits<double>::infinity();
    const auto S = static_cast<Index>(s);
    for (Index a = 1; a <= std::min(S, nodes); ++a) {
        if (S % a) continue;
        const Index rest = S / a;
        if (dim == 1) {
            if (rest != 1) continue;
            return {a, 1, 1};
        }
        for (Index b = 1; b <= std::min(rest, nodes); ++b) {
            if (rest % b) continue;
            const Index c = rest / b;
            if (dim == 2 && c != 1) continue;
            if (c > nodes) continue;
            const Index mx = std::max({a, b, c}), mn = std::min({a, b, dim == 3 ? c : a});
            const double ratio = static_cast<double>(mx) / static_cast<double>(mn);
            if (ratio < best_ratio || (ratio == best_ratio && std::array<Index, 3>{a, b, c} > best)) {
                best_ratio = ratio;
                best = {a, b, c};
            }
        }
    }
    if (best[0] == 0)
        throw std::invalid_argument("partition_structured: cannot split " +
                                    std::to_string(nodes) + " nodes per axis into " +
                                    std::to_string(s) + " blocks");
    return best;
}

// Block index of node coordinate i when m nodes are split into f chunks,
// the first m % f chunks one node longer.
Index chunk_of(Index i, Index m, Index f) {
    const Index base = m / f, extra = m % f;
    const Index big = extra * (base + 1);
    return i < big ? i / (base + 1) : extra + (i - big) / base;
}

} // namespace

std::vector<std::vector<Index>> grow_overlap(const std::vector<std::vector<Index>>& sets,
                                             const std::vector<std::vector<Index>>& adjacency,
                                             std::size_t layers) {
    std::vector<std::vector<Index>> out;
    out.reserve(sets.size());
    std::vector<char> in(adjacency.size(), 0);
    for (const auto& set : sets) {
        std::vector<Index> members = set;
        for (Index i : members) in[i] = 1;
        std::vector<Index> frontier = set;
        for (std::size_t l = 0; l < layers; ++l) {
            std::vector<Index> next;
            for (Index i : frontier)
                for (Index j : adjacency[i])
                    if (!in[j]) {
                        in[j] = 1;
                        next.push_back(j);
                    }
            members.insert(members.end(), next.begin(), next.end());
            frontier = std::move(next);
        }
        for (Index i : members) in[i] = 0;
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

Partition partition_structured(const fem::StructuredMesh& mesh, std::size_t subdomains,
                               std::size_t overlap) {
    if (subdomains == 0) throw std::invalid_argument("partition_structured: need >= 1 subdomain");
    const Index m = mesh.nodes_per_axis();
    Partition p;
    p.overlap = overlap;
    p.blocks_per_axis = factor_blocks(subdomains, mesh.dim, m);
    const auto& f = p.blocks_per_axis;
    p.nonoverlapping.assign(subdomains, {});

    for (std::size_t node = 0; node < mesh.num_nodes(); ++node) {
        Index idx = static_cast<Index>(node);
        Index block = 0, stride = 1;
        for (int a = 0; a < mesh.dim; ++a) {
            const Index coord = idx % m;
            idx /= m;
            block += chunk_of(coord, m, f[a]) * stride;
            stride *= f[a];
        }
        p.nonoverlapping[block].push_back(static_cast<Index>(node));
    }
    p.overlapping = overlap == 0 ? p.nonoverlapping
                                 : grow_overlap(p.nonoverlapping, fem::node_adjacency(mesh),
                                                overlap);
    return p;
}

void validate_partition(const Partition& p, std::size_t num_nodes) {
    if (p.overlapping.size() != p.nonoverlapping.size())
        throw std::invalid_argument("partition: set count mismatch");
    std::vector<int> owner(num_nodes, -1);
    for (std::size_t s = 0; s < p.nonoverlapping.size(); ++s)
        for (Index i : p.nonoverlapping[s]) {
            if (i < 0 || static_cast<std::size_t>(i) >= num_nodes)
                throw std::invalid_argument("partition: node index out of range");
            if (owner[i] >= 0) throw std::invalid_argument("partition: sets overlap");
            owner[i] = static_cast<int>(s);
        }
    for (int o : owner)
        if (o < 0) throw std::invalid_argument("partition: node not covered");
    for (std::size_t s = 0; s < p.nonoverlapping.size(); ++s)
        if (!std::includes(p.overlapping[s].begin(), p.overlapping[s].end(),
                           p.nonoverlapping[s].begin(), p.nonoverlapping[s].end()))
            throw std::invalid_argument("partition: overlapping set misses its core");
}

} // namespace hyprec
