#pragma once

#include <memory>
#include <vector>

#include "hyprec/precond/preconditioner.hpp"

namespace hyprec {

enum class CompositionMode { Multiplicative, Additive };

struct WeightedPart {
    Preconditioner prec;
    double gamma = 1.0;
};

/// Subspace-correction composition of several preconditioners.
///
/// Additive:        z = sum_s gamma_s M_s r
/// Multiplicative:  z_0 = 0, z_s = z_{s-1} + gamma_s M_s (r - A z_{s-1})
///
/// For linear parts the error propagation I - A M of the result is
/// prod_s (I - gamma_s A M_s) (last part leftmost) or I - sum_s gamma_s A M_s.
/// The composite is flagged SPD when every part is SPD with a positive
/// weight and, for the multiplicative mode, the part sequence reads the
/// same backwards (e.g. pre-smoother, coarse, post-smoother).
Preconditioner make_composite(std::shared_ptr<const CsrMatrix> a, std::vector<WeightedPart> parts,
                              CompositionMode mode);

/// [pre, coarse, pre]: the symmetric two-level cycle.
Preconditioner make_symmetric_two_level(std::shared_ptr<const CsrMatrix> a,
                                        const Preconditioner& smoother,
                                        const Preconditioner& coarse);

} // namespace hyprec
