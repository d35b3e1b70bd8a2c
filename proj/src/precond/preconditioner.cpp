#include "hyprec/precond/preconditioner.hpp"

#include "hyprec/linalg/lu.hpp"
#include "hyprec/util/errors.hpp"

namespace hyprec {

Preconditioner::Preconditioner(std::size_t size, ApplyFn apply, PrecFlags flags,
                               std::string label)
    : size_(size), fn_(std::make_shared<const ApplyFn>(std::move(apply))), flags_(flags),
      label_(std::move(label)) {}

Vector Preconditioner::apply(std::span<const double> r) const {
    if (r.size() != size_)
        throw DimensionError("preconditioner '" + label_ + "': expected length " +
                             std::to_string(size_) + ", got " + std::to_string(r.size()));
    return (*fn_)(r);
}

Preconditioner identity_preconditioner(std::size_t n) {
    return Preconditioner(
        n, [](std::span<const double> r) { return Vector(r.begin(), r.end()); },
        PrecFlags{true, true}, "identity");
}

Preconditioner exact_inverse(const CsrMatrix& a, bool spd) {
    auto lu = std::make_shared<const LuFactorization>(a.to_dense());
    return Preconditioner(
        a.rows(), [lu](std::span<const double> r) { return lu->solve(r); },
        PrecFlags{true, spd}, "exact");
}

} // namespace hyprec
