#pragma once

#include <memory>

#include "hyprec/precond/preconditioner.hpp"

namespace hyprec {

struct JacobiOptions {
    double gamma = 2.0 / 3.0;
    std::size_t steps = 1; ///< Richardson sweeps z <- z + gamma D^{-1} (r - A z) from z = 0
};

/// Damped Jacobi. Throws std::invalid_argument when a diagonal entry is zero.
Preconditioner make_jacobi(std::shared_ptr<const CsrMatrix> a, JacobiOptions options = {});

/// Level-dependent damping for Helmholtz, (2 - k^2 h^2) / (3 - k^2 h^2).
/// Throws std::domain_error when k h is within 1e-12 of sqrt(3).
double jacobi_gamma_helmholtz(double k_h, double h);

} // namespace hyprec
