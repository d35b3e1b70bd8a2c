#include "hyprec/precond/jacobi.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hyprec {

Preconditioner make_jacobi(std::shared_ptr<const CsrMatrix> a, JacobiOptions options) {
    if (options.steps < 1) throw std::invalid_argument("jacobi: steps must be >= 1");
    const Vector d = a->diagonal();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] == 0.0)
            throw std::invalid_argument("jacobi: zero diagonal entry at row " + std::to_string(i));
    const double gamma = options.gamma;
    const std::size_t steps = options.steps;
    // Divide rather than multiply by 1/d: with gamma = 1 this matches a 1x1 direct solve bit for bit.
    auto apply = [a, d, gamma, steps](std::span<const double> r) {
        const std::size_t n = r.size();
        Vector z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = gamma * (r[i] / d[i]);
        Vector az(n);
        for (std::size_t s = 1; s < steps; ++s) {
            spmv(*a, z, az);
            for (std::size_t i = 0; i < n; ++i) z[i] += gamma * ((r[i] - az[i]) / d[i]);
        }
        return z;
    };
    char label[64];
    std::snprintf(label, sizeof label, "jacobi(nu=%zu,gamma=%.6g)", steps, gamma);
    // Symmetric for symmetric A; positive for the damping range used here.
    return Preconditioner(a->rows(), std::move(apply), PrecFlags{true, gamma > 0.0}, label);
}

double jacobi_gamma_helmholtz(double k_h, double h) {
    const double kh2 = k_h * k_h * h * h;
    if (std::abs(3.0 - kh2) < 1e-12)
        throw std::domain_error("jacobi_gamma_helmholtz: 3 - k^2 h^2 vanishes");
    return (2.0 - kh2) / (3.0 - kh2);
}

} // namespace hyprec
