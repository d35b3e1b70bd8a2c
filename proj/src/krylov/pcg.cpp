#include "hyprec/krylov/solvers.hpp"

#include <cmath>
#include <stdexcept>

#include "hyprec/util/errors.hpp"

namespace hyprec {

namespace {

void check_system(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                  const Preconditioner& m) {
    if (a.rows() != a.cols()) throw DimensionError("solver: matrix must be square");
    if (f.size() != a.rows() || x0.size() != a.rows() || m.size() != a.rows())
        throw DimensionError("solver: inconsistent system dimensions");
}

} // namespace

SolveReport pcg(const CsrMatrix& a, std::span<const double> f, const Preconditioner& m,
                std::span<const double> x0, const StopCriteria& stop,
                const PcgOptions& options) {
    check_system(a, f, x0, m);
    stop.validate();
    if (!m.linear() || !m.spd())
        throw std::invalid_argument("pcg: preconditioner '" + m.label() +
                                    "' is not flagged linear and SPD");

    SolveReport rep;
    Vector u(x0.begin(), x0.end());
    Vector r = subtract(f, spmv(a, u));
    const double r0 = norm2(r);
    rep.residual_history.push_back(r0);

    auto finish = [&](Termination t) {
        rep.termination = t;
        const double res = norm2(subtract(f, spmv(a, u)));
        rep.final_relative_residual = r0 > 0.0 ? res / r0 : res;
        rep.solution = std::move(u);
        return rep;
    };

    if (r0 <= stop.abs_res) return finish(Termination::AbsRes);

    Vector z = m.apply(r);
    if (options.observer) options.observer(0, r, z);
    double rz = dot(r, z);
    if (!(rz > 0.0)) return finish(Termination::Breakdown);
    Vector p = z;
    Vector ap(a.rows());

    for (std::size_t it = 1; it <= stop.max_iters; ++it) {
        spmv(a, p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0) || !std::isfinite(pap)) return finish(Termination::Breakdown);
        const double alpha = rz / pap;
        axpy(alpha, p, u);
        axpy(-alpha, ap, r);
        const double rn = norm2(r);
        rep.iterations = it;
        rep.residual_history.push_back(rn);

        if (rn <= stop.abs_res) return finish(Termination::AbsRes);
        // |u_i - u_{i-1}|_A = |alpha| sqrt(<p, A p>)
        if (stop.use_a_norm && std::abs(alpha) * std::sqrt(pap) <= stop.a_norm_increment)
            return finish(Termination::ANormInc);
        if (rn / r0 <= stop.rel_res) return finish(Termination::RelRes);
        if (it == stop.max_iters) break;

        z = m.apply(r);
        if (options.observer) options.observer(it, r, z);
        const double rz_next = dot(r, z);
        if (!(rz_next > 0.0)) return finish(Termination::Breakdown);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    return finish(Termination::MaxIters);
}

} // namespace hyprec
