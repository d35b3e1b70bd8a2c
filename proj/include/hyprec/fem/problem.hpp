#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyprec/fem/grf.hpp"
#include "hyprec/fem/mesh.hpp"
#include "hyprec/linalg/csr.hpp"

namespace hyprec::fem {

enum class Variant { Diff, JumpDiff, Helm1D, Helm2D, Identity };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Axis-aligned box [x0,x1] x [y0,y1].
struct Box {
    double x0, x1, y0, y1;
};

struct ProblemSpec {
    Variant variant = Variant::Diff;
    int dim = 2;
    /// Cells per axis; when zero it is derived from `level`.
    Index cells = 0;
    int level = 1;

    // Diff: nodal coefficient is log-normal with mean `coefficient.mean`;
    // the underlying Gaussian field has standard deviation `coefficient.sigma`.
    GrfParams coefficient{0.5, 1.0, 0.1};
    GrfParams forcing{0.0, 1.0, 0.05};
    std::optional<double> constant_coefficient;

    // JumpDiff
    std::vector<Box> channels{{0.125, 0.875, 0.225, 0.325}, {0.125, 0.875, 0.675, 0.775}};
    Index channel_snap_cells = 39;
    std::optional<double> channel_k; ///< sampled as 10^U[0,5] when unset
    double log10_k_max = 5.0;

    // Helm1D / Helm2D
    double k_h = 0.0;
    bool auto_k_h = true; ///< Helm2D: use 2^(l-2) pi / 1.6
    bool allow_underresolved = false;
    bool squared_distance = false; ///< Helm2D source exponent uses |x - theta|^2
    GrfParams helm_forcing{0.0, 1.0, 0.1};

    Index resolved_cells() const;
};

/// Spatial dimension implied by the variant (Helm1D is 1D, JumpDiff and
/// Helm2D are 2D, otherwise `dim`).
int problem_dim(const ProblemSpec& spec);

struct Problem {
    ProblemSpec spec;
    StructuredMesh mesh;
    std::shared_ptr<const CsrMatrix> a;
    Vector rhs;
    /// Sampled scalar parameters (channel K, source location, k_H, ...).
    std::map<std::string, double> meta;
    /// Sampled input functions or parameters, in branch order.
    std::vector<std::pair<std::string, Vector>> inputs;
    bool symmetric_positive_definite = true;
};

/// Builds the linear system for one draw of the problem parameters.
Problem build_problem(const ProblemSpec& spec, Rng& rng);

/// Reuses GRF factors across draws on the same mesh.
class ProblemFactory {
public:
    explicit ProblemFactory(ProblemSpec spec);
    const ProblemSpec& spec() const { return spec_; }
    const StructuredMesh& mesh() const { return mesh_; }
    Problem build(Rng& rng);

private:
    ProblemSpec spec_;
    StructuredMesh mesh_;
    GrfSampler coefficient_;
    GrfSampler forcing_;
};

/// Element coefficient of the channel problem for a given channel value.
Vector jump_coefficient(const StructuredMesh& mesh, const ProblemSpec& spec, double channel_k);

/// Helm2D source width sigma_H = 0.8 / 2^(l-2).
double helm2d_sigma(int level);
/// Helm2D minimal wave number 2^(l-2) pi / 1.6.
double helm2d_min_k(int level);

} // namespace hyprec::fem
