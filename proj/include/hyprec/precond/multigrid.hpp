#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyprec/fem/mesh.hpp"
#include "hyprec/linalg/lu.hpp"
#include "hyprec/precond/preconditioner.hpp"

namespace hyprec {

/// One entry of a smoothing schedule: J (damped Jacobi), M(k) (Jacobi
/// composed multiplicatively with a k-dimensional coarse space) or D
/// (direct solve, coarsest level only).
struct SmootherSpec {
    enum class Kind { Jacobi, Composite, Direct };
    Kind kind = Kind::Jacobi;
    std::size_t steps = 3;
    std::optional<double> gamma; ///< unset: MgOptions::jacobi_gamma(h)
    std::size_t coarse_k = 0;

    static SmootherSpec jacobi(std::size_t steps = 3) { return {Kind::Jacobi, steps, {}, 0}; }
    static SmootherSpec composite(std::size_t k, std::size_t steps = 3) {
        return {Kind::Composite, steps, {}, k};
    }
    static SmootherSpec direct() { return {Kind::Direct, 0, {}, 0}; }
};

/// Parses "J J M(24) D" (finest level first; commas also separate).
std::vector<SmootherSpec> parse_schedule(const std::string& text);
std::string schedule_to_string(const std::vector<SmootherSpec>& schedule);

/// Pre- and post-smoother for one level; `post` should be the adjoint of
/// `pre` for a symmetric cycle.
struct SmootherPair {
    Preconditioner pre;
    Preconditioner post;
};

struct MgLevelContext {
    std::size_t level; ///< 0 = finest
    const fem::StructuredMesh& mesh;
    std::shared_ptr<const CsrMatrix> a;
    const SmootherSpec& spec;
    double gamma; ///< resolved Jacobi damping
};

using SmootherFactory = std::function<SmootherPair(const MgLevelContext&)>;

struct MgOptions {
    std::vector<SmootherSpec> schedule; ///< finest first; the last entry must be D
    /// Operator on a given mesh (re-discretization).
    std::function<CsrMatrix(const fem::StructuredMesh&)> assemble;
    /// Damping used for J entries without an explicit gamma.
    std::function<double(double h)> jacobi_gamma = [](double) { return 2.0 / 3.0; };
    /// Needed for M(k) entries; Jacobi-only schedules work without it.
    SmootherFactory composite_factory;
    /// Coarse operators as P^T A P instead of re-discretization.
    bool galerkin = false;
    /// Advertise the cycle as SPD (valid for SPD operators with adjoint
    /// smoother pairs).
    bool spd = true;
};

/// Linear interpolation from the mesh with `coarse.cells` to the nested
/// mesh with `fine.cells` (= 2 coarse.cells). Rows of fine boundary nodes
/// and columns of coarse boundary nodes are zero.
CsrMatrix prolongation(const fem::StructuredMesh& fine, const fem::StructuredMesh& coarse);

/// Geometric V-cycle over uniformly coarsened structured meshes.
class MultigridHierarchy {
public:
    MultigridHierarchy(const fem::StructuredMesh& finest, MgOptions options);

    std::size_t num_levels() const { return levels_.size(); }
    const CsrMatrix& level_operator(std::size_t l) const { return *levels_[l].a; }
    const fem::StructuredMesh& level_mesh(std::size_t l) const { return levels_[l].mesh; }

    Vector vcycle(std::span<const double> r) const;
    Preconditioner as_preconditioner() const;

private:
    struct Level {
        fem::StructuredMesh mesh;
        std::shared_ptr<const CsrMatrix> a;
        CsrMatrix p; ///< to the next coarser level
        std::optional<SmootherPair> smoother;
        std::optional<LuFactorization> direct;
    };
    Vector cycle(std::size_t l, std::span<const double> r) const;

    std::vector<Level> levels_;
    std::string label_;
    bool linear_ = true;
    bool spd_ = true;
};

} // namespace hyprec
