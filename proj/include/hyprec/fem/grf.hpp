#pragma once

#include "hyprec/linalg/dense.hpp"
#include "hyprec/util/rng.hpp"

namespace hyprec::fem {

struct GrfParams {
    double mean = 0.0;
    double sigma = 1.0;
    double ell = 0.1;
};

/// Gaussian random field with exponential covariance
/// sigma^2 exp(-|x - y| / (2 ell^2)), sampled through a dense Cholesky
/// factor of the covariance on the target points. The factor is cached for
/// the most recent point set; a sampler instance is not thread-safe.
class GrfSampler {
public:
    explicit GrfSampler(GrfParams params);

    const GrfParams& params() const { return params_; }
    double covariance(std::span<const double> x, std::span<const double> y) const;

    /// Throws SingularMatrixError when jitter up to 1e-2 sigma^2 does not
    /// make the covariance factorizable.
    Vector sample(const DenseMatrix& points, Rng& rng);

    /// Jitter that was added to the diagonal for the cached factor.
    double jitter() const { return jitter_; }

private:
    void prepare(const DenseMatrix& points);

    GrfParams params_;
    DenseMatrix points_;
    DenseMatrix factor_;
    double jitter_ = 0.0;
};

} // namespace hyprec::fem
