#include "hyprec/precond/composite.hpp"

#include <stdexcept>

#include "hyprec/linalg/kernels.hpp"

namespace hyprec {

namespace {

bool is_palindrome(const std::vector<WeightedPart>& parts) {
    for (std::size_t i = 0, j = parts.size() - 1; i < j; ++i, --j)
        if (!parts[i].prec.same_as(parts[j].prec) || parts[i].gamma != parts[j].gamma)
            return false;
    return true;
}

std::string join_label(const std::vector<WeightedPart>& parts, CompositionMode mode) {
    std::string s = mode == CompositionMode::Additive ? "add(" : "mult(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ",";
        if (parts[i].gamma != 1.0) s += std::to_string(parts[i].gamma) + "*";
        s += parts[i].prec.label();
    }
    return s + ")";
}

} // namespace

Preconditioner make_composite(std::shared_ptr<const CsrMatrix> a, std::vector<WeightedPart> parts,
                              CompositionMode mode) {
    if (parts.empty()) throw std::invalid_argument("composite: needs at least one part");
    const std::size_t n = a->rows();
    bool linear = true, spd = true;
    for (const auto& p : parts) {
        if (p.prec.size() != n) throw std::invalid_argument("composite: part size mismatch");
        linear = linear && p.prec.linear();
        spd = spd && p.prec.spd() && p.prec.linear() && p.gamma > 0.0;
    }
    if (mode == CompositionMode::Multiplicative && !is_palindrome(parts)) spd = false;
    std::string label = join_label(parts, mode);

    Preconditioner::ApplyFn apply;
    if (mode == CompositionMode::Additive) {
        apply = [parts](std::span<const double> r) {
            Vector z(r.size(), 0.0);
            for (const auto& p : parts) kernels::axpy(p.gamma, p.prec.apply(r), z);
            return z;
        };
    } else {
        apply = [a, parts](std::span<const double> r) {
            const std::size_t n = r.size();
            Vector z(n, 0.0), res(n), az(n);
            for (std::size_t s = 0; s < parts.size(); ++s) {
                if (s == 0) {
                    res.assign(r.begin(), r.end());
                } else {
                    spmv(*a, z, az);
                    for (std::size_t i = 0; i < n; ++i) res[i] = r[i] - az[i];
                }
                kernels::axpy(parts[s].gamma, parts[s].prec.apply(res), z);
            }
            return z;
        };
    }
    return Preconditioner(n, std::move(apply), PrecFlags{linear, spd}, std::move(label));
}

Preconditioner make_symmetric_two_level(std::shared_ptr<const CsrMatrix> a,
                                        const Preconditioner& smoother,
                                        const Preconditioner& coarse) {
    return make_composite(std::move(a), {{smoother, 1.0}, {coarse, 1.0}, {smoother, 1.0}},
                          CompositionMode::Multiplicative);
}

} // namespace hyprec
