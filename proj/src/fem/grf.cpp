#include "hyprec/fem/grf.hpp"

#include <cmath>
#include <stdexcept>

#include "hyprec/util/errors.hpp"

namespace hyprec::fem {

GrfSampler::GrfSampler(GrfParams params) : params_(params) {
    if (params_.sigma < 0.0 || params_.ell <= 0.0)
        throw std::invalid_argument("GrfSampler: need sigma >= 0 and ell > 0");
}

double GrfSampler::covariance(std::span<const double> x, std::span<const double> y) const {
    double d2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) d2 += (x[a] - y[a]) * (x[a] - y[a]);
    return params_.sigma * params_.sigma *
           std::exp(-std::sqrt(d2) / (2.0 * params_.ell * params_.ell));
}

void GrfSampler::prepare(const DenseMatrix& points) {
    if (!factor_.empty() && points == points_) return;
    const std::size_t n = points.rows();
    DenseMatrix cov(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double c = covariance(points.row(i), points.row(j));
            cov(i, j) = c;
            cov(j, i) = c;
        }
    const double s2 = params_.sigma * params_.sigma;
    for (double jitter = 1e-10 * s2; jitter <= 1e-2 * s2 * (1 + 1e-9); jitter *= 10.0) {
        DenseMatrix work = cov;
        for (std::size_t i = 0; i < n; ++i) work(i, i) += jitter;
        if (kernels::cholesky(n, work.data().data()) == n) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) work(i, j) = 0.0;
            factor_ = std::move(work);
            points_ = points;
            jitter_ = jitter;
            return;
        }
    }
    throw SingularMatrixError("GrfSampler: covariance not factorizable with maximal jitter");
}

Vector GrfSampler::sample(const DenseMatrix& points, Rng& rng) {
    const std::size_t n = points.rows();
    if (params_.sigma == 0.0) return Vector(n, params_.mean);
    prepare(points);
    Vector z(n);
    for (double& zi : z) zi = rng.normal();
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = factor_.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += row[j] * z[j];
        out[i] = params_.mean + s;
    }
    return out;
}

} // namespace hyprec::fem
