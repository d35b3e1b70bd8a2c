#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "hyprec/linalg/csr.hpp"

namespace hyprec {

struct PrecFlags {
    bool linear = true;
    bool spd = true;
};

/// Type-erased action z = M r. Copies share the underlying state, and two
/// handles compare equal through `same_as` when they wrap the same state.
class Preconditioner {
public:
    using ApplyFn = std::function<Vector(std::span<const double>)>;

    Preconditioner(std::size_t size, ApplyFn apply, PrecFlags flags, std::string label);

    /// Throws DimensionError for a wrong-length input.
    Vector apply(std::span<const double> r) const;

    std::size_t size() const { return size_; }
    bool linear() const { return flags_.linear; }
    bool spd() const { return flags_.spd; }
    PrecFlags flags() const { return flags_; }
    const std::string& label() const { return label_; }
    bool same_as(const Preconditioner& other) const { return fn_ == other.fn_; }

private:
    std::size_t size_;
    std::shared_ptr<const ApplyFn> fn_;
    PrecFlags flags_;
    std::string label_;
};

Preconditioner identity_preconditioner(std::size_t n);

/// Exact inverse by dense LU; small systems only.
Preconditioner exact_inverse(const CsrMatrix& a, bool spd = true);

} // namespace hyprec
