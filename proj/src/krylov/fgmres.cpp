#include "hyprec/krylov/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "hyprec/util/errors.hpp"

namespace hyprec {

namespace {

// Solves the leading (k x k) upper-triangular system of the rotated
// Hessenberg matrix.
Vector back_substitute(const DenseMatrix& h, const Vector& g, std::size_t k) {
    Vector y(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        double s = g[i];
        for (std::size_t j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
        y[i] = s / h(i, i);
    }
    return y;
}

} // namespace

SolveReport fgmres(const CsrMatrix& a, std::span<const double> f, const Preconditioner& m,
                   std::span<const double> x0, const StopCriteria& stop,
                   const FgmresOptions& options) {
    if (a.rows() != a.cols()) throw DimensionError("fgmres: matrix must be square");
    if (f.size() != a.rows() || x0.size() != a.rows() || m.size() != a.rows())
        throw DimensionError("fgmres: inconsistent system dimensions");
    if (options.restart < 1) throw std::invalid_argument("fgmres: restart must be >= 1");
    stop.validate();

    const std::size_t n = a.rows();
    const std::size_t mdim = options.restart;
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

    double beta = r0;
    std::vector<Vector> v, z;
    Vector w(n), aw(n);

    while (true) {
        v.assign(1, scaled(1.0 / beta, r));
        z.clear();
        DenseMatrix hbar(mdim + 1, mdim); // raw Hessenberg, kept for the observer
        DenseMatrix h(mdim + 1, mdim);    // Givens-rotated copy
        Vector cs(mdim, 0.0), sn(mdim, 0.0), g(mdim + 1, 0.0);
        g[0] = beta;
        Vector y_prev;
        std::optional<Termination> reason;
        bool happy = false;
        std::size_t k = 0;

        for (std::size_t i = 0; i < mdim; ++i) {
            z.push_back(m.apply(v[i]));
            spmv(a, z[i], w);
            for (std::size_t j = 0; j <= i; ++j) {
                const double hji = dot(w, v[j]);
                hbar(j, i) = hji;
                axpy(-hji, v[j], w);
            }
            if (options.reorthogonalize) {
                for (std::size_t j = 0; j <= i; ++j) {
                    const double c = dot(w, v[j]);
                    hbar(j, i) += c;
                    axpy(-c, v[j], w);
                }
            }
            const double wn = norm2(w);
            hbar(i + 1, i) = wn;

            for (std::size_t j = 0; j <= i + 1; ++j) h(j, i) = hbar(j, i);
            for (std::size_t j = 0; j < i; ++j) {
                const double t = cs[j] * h(j, i) + sn[j] * h(j + 1, i);
                h(j + 1, i) = -sn[j] * h(j, i) + cs[j] * h(j + 1, i);
                h(j, i) = t;
            }
            const double denom = std::hypot(h(i, i), h(i + 1, i));
            if (denom == 0.0) {
                cs[i] = 1.0;
                sn[i] = 0.0;
            } else {
                cs[i] = h(i, i) / denom;
                sn[i] = h(i + 1, i) / denom;
            }
            h(i, i) = cs[i] * h(i, i) + sn[i] * h(i + 1, i);
            h(i + 1, i) = 0.0;
            g[i + 1] = -sn[i] * g[i];
            g[i] = cs[i] * g[i];

            k = i + 1;
            ++rep.iterations;
            const double res = std::abs(g[i + 1]);
            rep.residual_history.push_back(res);

            happy = wn <= 1e-14 * std::max(1.0, std::abs(hbar(i, i)));
            if (h(i, i) == 0.0) {
                // Singular least-squares problem: nothing more to gain here.
                k = i;
                reason = Termination::Breakdown;
                break;
            }

            if (res <= stop.abs_res) {
                reason = Termination::AbsRes;
            } else if (stop.use_a_norm) {
                const Vector y = back_substitute(h, g, k);
                Vector du(n, 0.0);
                for (std::size_t j = 0; j < k; ++j) {
                    const double c = y[j] - (j < y_prev.size() ? y_prev[j] : 0.0);
                    if (c != 0.0) axpy(c, z[j], du);
                }
                const double q = dot(du, spmv(a, du));
                if (std::sqrt(std::max(0.0, q)) <= stop.a_norm_increment)
                    reason = Termination::ANormInc;
                y_prev = y;
            }
            if (!reason && res / r0 <= stop.rel_res) reason = Termination::RelRes;
            if (reason || happy || rep.iterations >= stop.max_iters) break;
            v.push_back(scaled(1.0 / wn, w));
        }

        if (k > 0) {
            const Vector y = back_substitute(h, g, k);
            for (std::size_t j = 0; j < k; ++j) axpy(y[j], z[j], u);
        }
        r = subtract(f, spmv(a, u));
        beta = norm2(r);

        if (options.observer && k > 0) {
            ArnoldiCycle cyc{DenseMatrix(n, k), DenseMatrix(n, k + 1), DenseMatrix(k + 1, k),
                             std::abs(g[k]), beta};
            for (std::size_t j = 0; j < k; ++j) cyc.z.set_column(j, z[j]);
            for (std::size_t j = 0; j < k + 1 && j < v.size(); ++j) cyc.v.set_column(j, v[j]);
            if (v.size() < k + 1 && !happy) cyc.v.set_column(k, scaled(1.0 / hbar(k, k - 1), w));
            for (std::size_t i = 0; i < k + 1; ++i)
                for (std::size_t j = 0; j < k; ++j) cyc.hbar(i, j) = hbar(i, j);
            options.observer(cyc);
        }

        if (reason) return finish(*reason);
        if (beta <= stop.abs_res) return finish(Termination::AbsRes);
        if (beta / r0 <= stop.rel_res) return finish(Termination::RelRes);
        if (happy) return finish(Termination::Breakdown);
        if (rep.iterations >= stop.max_iters) return finish(Termination::MaxIters);
    }
}

} // namespace hyprec
