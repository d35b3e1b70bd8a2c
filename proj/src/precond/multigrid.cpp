#include "hyprec/precond/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hyprec/precond/composite.hpp"
#include "hyprec/precond/jacobi.hpp"

namespace hyprec {

std::vector<SmootherSpec> parse_schedule(const std::string& text) {
    std::vector<SmootherSpec> out;
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::string tok;
    while (in >> tok) {
        if (tok == "J" || tok == "j") {
            out.push_back(SmootherSpec::jacobi());
        } else if (tok == "D" || tok == "d") {
            out.push_back(SmootherSpec::direct());
        } else if ((tok[0] == 'M' || tok[0] == 'm') && tok.size() > 1) {
            std::string num = tok.substr(1);
            num.erase(std::remove(num.begin(), num.end(), '('), num.end());
            num.erase(std::remove(num.begin(), num.end(), ')'), num.end());
            std::size_t pos = 0;
            const unsigned long k = std::stoul(num, &pos);
            if (pos != num.size() || k == 0)
                throw std::invalid_argument("schedule: bad composite entry '" + tok + "'");
            out.push_back(SmootherSpec::composite(k));
        } else {
            throw std::invalid_argument("schedule: unknown entry '" + tok + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("schedule: empty");
    return out;
}

std::string schedule_to_string(const std::vector<SmootherSpec>& schedule) {
    std::string s;
    for (const auto& e : schedule) {
        if (!s.empty()) s += " ";
        switch (e.kind) {
        case SmootherSpec::Kind::Jacobi: s += "J"; break;
        case SmootherSpec::Kind::Direct: s += "D"; break;
        case SmootherSpec::Kind::Composite: s += "M(" + std::to_string(e.coarse_k) + ")"; break;
        }
    }
    return s;
}

CsrMatrix prolongation(const fem::StructuredMesh& fine, const fem::StructuredMesh& coarse) {
    if (fine.dim != coarse.dim || fine.cells != 2 * coarse.cells)
        throw std::invalid_argument("prolongation: meshes are not nested by one refinement");
    const int d = fine.dim;
    const double hc = coarse.h();
    std::vector<Triplet> t;
    for (std::size_t node = 0; node < fine.num_nodes(); ++node) {
        if (fine.dirichlet[node]) continue;
        Index cell[3] = {0, 0, 0};
        double xi[3] = {0, 0, 0};
        for (int a = 0; a < d; ++a) {
            const double x = fine.coords(node, a) / hc;
            cell[a] = std::min<Index>(static_cast<Index>(std::floor(x)), coarse.cells - 1);
            xi[a] = x - static_cast<double>(cell[a]);
        }
        // Kuhn simplex containing xi: axes sorted by decreasing local coordinate.
        int order[3] = {0, 1, 2};
        std::sort(order, order + d, [&](int a, int b) { return xi[a] > xi[b] || (xi[a] == xi[b] && a < b); });
        int bits = 0;
        double prev = 1.0;
        auto emit = [&](int corner_bits, double w) {
            if (std::abs(w) < 1e-14) return;
            const Index c = coarse.node_index(cell[0] + (corner_bits & 1),
                                              cell[1] + ((corner_bits >> 1) & 1),
                                              cell[2] + ((corner_bits >> 2) & 1));
            if (coarse.dirichlet[c]) return;
            t.push_back({static_cast<Index>(node), c, w});
        };
        for (int s = 0; s < d; ++s) {
            const double cur = xi[order[s]];
            emit(bits, prev - cur);
            bits |= 1 << order[s];
            prev = cur;
        }
        emit(bits, prev);
    }
    return CsrMatrix::from_triplets(fine.num_nodes(), coarse.num_nodes(), std::move(t));
}

MultigridHierarchy::MultigridHierarchy(const fem::StructuredMesh& finest, MgOptions options) {
    const auto& schedule = options.schedule;
    if (schedule.empty()) throw std::invalid_argument("multigrid: empty schedule");
    if (schedule.back().kind != SmootherSpec::Kind::Direct)
        throw std::invalid_argument("multigrid: coarsest schedule entry must be D");
    for (std::size_t l = 0; l + 1 < schedule.size(); ++l)
        if (schedule[l].kind == SmootherSpec::Kind::Direct)
            throw std::invalid_argument("multigrid: D is only allowed on the coarsest level");
    if (!options.assemble) throw std::invalid_argument("multigrid: no assembly callback");

    const std::size_t nlev = schedule.size();
    levels_.resize(nlev);
    levels_[0].mesh = finest;
    for (std::size_t l = 1; l < nlev; ++l) {
        const auto& prev = levels_[l - 1].mesh;
        if (prev.cells % 2 != 0 || prev.cells / 2 < 2)
            throw std::invalid_argument("multigrid: schedule has more levels (" +
                                        std::to_string(nlev) + ") than the mesh supports");
        levels_[l].mesh = fem::build_mesh(prev.dim, prev.cells / 2);
    }
    for (std::size_t l = 0; l + 1 < nlev; ++l)
        levels_[l].p = prolongation(levels_[l].mesh, levels_[l + 1].mesh);

    levels_[0].a = std::make_shared<const CsrMatrix>(options.assemble(levels_[0].mesh));
    for (std::size_t l = 1; l < nlev; ++l) {
        if (options.galerkin) {
            const auto& pf = levels_[l - 1].p;
            CsrMatrix ac = spgemm(pf.transpose(), spgemm(*levels_[l - 1].a, pf));
            // Boundary nodes are outside the range of P; keep them as identity rows.
            std::vector<Triplet> diag;
            for (std::size_t i = 0; i < levels_[l].mesh.num_nodes(); ++i)
                if (levels_[l].mesh.dirichlet[i]) diag.push_back({Index(i), Index(i), 1.0});
            ac = add(ac, CsrMatrix::from_triplets(ac.rows(), ac.cols(), std::move(diag)));
            levels_[l].a = std::make_shared<const CsrMatrix>(std::move(ac));
        } else {
            levels_[l].a = std::make_shared<const CsrMatrix>(options.assemble(levels_[l].mesh));
        }
    }

    spd_ = options.spd;
    for (std::size_t l = 0; l < nlev; ++l) {
        auto& lev = levels_[l];
        const auto& spec = schedule[l];
        if (spec.kind == SmootherSpec::Kind::Direct) {
            lev.direct.emplace(lev.a->to_dense());
            continue;
        }
        const double gamma = spec.gamma.value_or(options.jacobi_gamma(lev.mesh.h()));
        if (spec.kind == SmootherSpec::Kind::Jacobi) {
            auto j = make_jacobi(lev.a, {gamma, spec.steps});
            lev.smoother = SmootherPair{j, j};
        } else {
            if (!options.composite_factory)
                throw std::invalid_argument("multigrid: M(k) entry needs a composite factory");
            lev.smoother = options.composite_factory({l, lev.mesh, lev.a, spec, gamma});
        }
        linear_ = linear_ && lev.smoother->pre.linear() && lev.smoother->post.linear();
    }
    spd_ = spd_ && linear_;
    label_ = "mg(" + schedule_to_string(schedule) + ")";
}

Vector MultigridHierarchy::cycle(std::size_t l, std::span<const double> r) const {
    const auto& lev = levels_[l];
    if (lev.direct) return lev.direct->solve(r);

    const std::size_t n = r.size();
    Vector z = lev.smoother->pre.apply(r);
    Vector res(n);
    spmv(*lev.a, z, res);
    for (std::size_t i = 0; i < n; ++i) res[i] = r[i] - res[i];

    const Vector rc = spmv_transpose(lev.p, res);
    const Vector ec = cycle(l + 1, rc);
    const Vector corr = spmv(lev.p, ec);
    for (std::size_t i = 0; i < n; ++i) z[i] += corr[i];

    spmv(*lev.a, z, res);
    for (std::size_t i = 0; i < n; ++i) res[i] = r[i] - res[i];
    const Vector post = lev.smoother->post.apply(res);
    for (std::size_t i = 0; i < n; ++i) z[i] += post[i];
    return z;
}

Vector MultigridHierarchy::vcycle(std::span<const double> r) const {
    if (r.size() != levels_[0].a->rows())
        throw std::invalid_argument("vcycle: residual length mismatch");
    return cycle(0, r);
}

Preconditioner MultigridHierarchy::as_preconditioner() const {
    auto self = std::make_shared<const MultigridHierarchy>(*this);
    return Preconditioner(
        levels_[0].a->rows(), [self](std::span<const double> r) { return self->vcycle(r); },
        PrecFlags{linear_, spd_}, label_);
}

} // namespace hyprec
