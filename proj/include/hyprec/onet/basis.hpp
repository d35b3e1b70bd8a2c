#pragma once

#include <array>
#include <memory>
#include <string>

#include "hyprec/onet/model.hpp"

namespace hyprec::onet {

/// Source of coarse-space candidate functions: p scalar fields that can be
/// evaluated at arbitrary points of [0,1]^dim.
class TrunkBasis {
public:
    virtual ~TrunkBasis() = default;
    virtual std::size_t size() const = 0;
    virtual int dim() const = 0;
    /// n x size() values at the rows of `points` (n x dim).
    virtual DenseMatrix eval(const DenseMatrix& points) const = 0;
    virtual std::string id() const = 0;
};

/// Trunk of a loaded DeepONet, boundary mask included.
class ModelTrunkBasis final : public TrunkBasis {
public:
    explicit ModelTrunkBasis(std::shared_ptr<const OnetModel> model);
    std::size_t size() const override { return model_->p; }
    int dim() const override { return model_->trunk_dim(); }
    DenseMatrix eval(const DenseMatrix& points) const override;
    std::string id() const override;

private:
    std::shared_ptr<const OnetModel> model_;
};

/// Dirichlet sine modes prod_a sin(m_a pi x_a), m_a >= 1, ordered by
/// increasing |m|^2 (ties lexicographic). Values on the boundary are
/// exactly zero. On uniform P1 meshes these are the eigenvectors of the
/// discrete Laplacian, which makes the family an analytic stand-in for a
/// trained trunk.
class SineBasis final : public TrunkBasis {
public:
    SineBasis(int dim, std::size_t p);
    std::size_t size() const override { return modes_.size(); }
    int dim() const override { return dim_; }
    DenseMatrix eval(const DenseMatrix& points) const override;
    std::string id() const override;

    const std::array<std::size_t, 3>& mode(std::size_t j) const { return modes_[j]; }

private:
    int dim_;
    std::vector<std::array<std::size_t, 3>> modes_;
};

} // namespace hyprec::onet
