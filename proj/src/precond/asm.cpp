#include "hyprec/precond/schwarz.hpp"

#include <string>

#include "hyprec/util/errors.hpp"

namespace hyprec {

AdditiveSchwarz::AdditiveSchwarz(std::shared_ptr<const CsrMatrix> a, const Partition& partition,
                                 bool spd)
    : n_(a->rows()), spd_(spd) {
    validate_partition(partition, n_);
    blocks_.resize(partition.size());
    for (std::size_t s = 0; s < partition.size(); ++s) {
        blocks_[s].dofs = partition.overlapping[s];
        try {
            blocks_[s].lu =
                LuFactorization(a->principal_submatrix(blocks_[s].dofs).to_dense());
        } catch (const SingularMatrixError& e) {
            throw SingularMatrixError("asm: local block of subdomain " + std::to_string(s) +
                                      " is singular (" + e.what() + ")");
        }
    }
}

Vector AdditiveSchwarz::apply(std::span<const double> r) const {
    const auto nb = static_cast<std::int64_t>(blocks_.size());
    std::vector<Vector> local(blocks_.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < nb; ++s) {
        const auto& b = blocks_[s];
        Vector x(b.dofs.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = r[b.dofs[i]];
        b.lu.solve_in_place(x);
        local[s] = std::move(x);
    }
    // Accumulate in subdomain order so the sum does not depend on threads.
    Vector z(n_, 0.0);
    for (std::size_t s = 0; s < blocks_.size(); ++s)
        for (std::size_t i = 0; i < local[s].size(); ++i) z[blocks_[s].dofs[i]] += local[s][i];
    return z;
}

Preconditioner AdditiveSchwarz::as_preconditioner() const {
    auto self = std::make_shared<const AdditiveSchwarz>(*this);
    return Preconditioner(
        n_, [self](std::span<const double> r) { return self->apply(r); }, PrecFlags{true, spd_},
        "asm(S=" + std::to_string(blocks_.size()) + ")");
}

Preconditioner make_asm(std::shared_ptr<const CsrMatrix> a, const Partition& partition,
                        bool spd) {
    return AdditiveSchwarz(std::move(a), partition, spd).as_preconditioner();
}

} // namespace hyprec
