#pragma once

#include <functional>
#include <span>

#include "hyprec/krylov/report.hpp"
#include "hyprec/linalg/csr.hpp"
#include "hyprec/precond/preconditioner.hpp"

namespace hyprec {

struct PcgOptions {
    /// Called with (iteration, r, z) for every preconditioned residual,
    /// including iteration 0.
    std::function<void(std::size_t, std::span<const double>, std::span<const double>)> observer;
};

/// Preconditioned conjugate gradients. M must be flagged linear and SPD
/// (std::invalid_argument otherwise). A non-positive curvature <p, Ap> or
/// <r, z> ends the solve with Termination::Breakdown.
SolveReport pcg(const CsrMatrix& a, std::span<const double> f, const Preconditioner& m,
                std::span<const double> x0, const StopCriteria& stop,
                const PcgOptions& options = {});

/// Dense snapshot of one flexible Arnoldi cycle: A Z = V Hbar.
struct ArnoldiCycle {
    DenseMatrix z;    ///< n x k
    DenseMatrix v;    ///< n x (k + 1)
    DenseMatrix hbar; ///< (k + 1) x k
    double implicit_residual = 0.0;
    double explicit_residual = 0.0;
};

struct FgmresOptions {
    std::size_t restart = 50;
    /// Second modified Gram-Schmidt pass per Arnoldi step.
    bool reorthogonalize = false;
    std::function<void(const ArnoldiCycle&)> observer;
};

/// Restarted flexible GMRES with right preconditioning; M may vary between
/// applications.
SolveReport fgmres(const CsrMatrix& a, std::span<const double> f, const Preconditioner& m,
                   std::span<const double> x0, const StopCriteria& stop,
                   const FgmresOptions& options = {});

} // namespace hyprec
