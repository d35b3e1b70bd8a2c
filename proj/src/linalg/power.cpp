#include "hyprec/linalg/eig.hpp"

#include <stdexcept>

#include "hyprec/util/rng.hpp"

namespace hyprec {

double spectral_radius_estimate(const LinearOperator& apply, std::size_t n, std::size_t iters,
                                std::uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("spectral_radius_estimate: iters must be >= 1");
    if (n == 0) return 0.0;
    Rng rng(seed);
    Vector x(n);
    for (double& xi : x) xi = rng.uniform(-1.0, 1.0);
    double nx = norm2(x);
    for (double& xi : x) xi /= nx;

    double estimate = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        Vector y = apply(x);
        estimate = norm2(y);
        if (estimate == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / estimate;
    }
    return estimate;
}

} // namespace hyprec
