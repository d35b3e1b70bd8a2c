#include "hyprec/cli/builder.hpp"

#include <algorithm>
#include <map>

#include "hyprec/fem/assemble.hpp"
#include "hyprec/onet/dp.hpp"
#include "hyprec/onet/onetpack.hpp"
#include "hyprec/onet/transfer.hpp"
#include "hyprec/precond/composite.hpp"
#include "hyprec/precond/jacobi.hpp"
#include "hyprec/precond/multigrid.hpp"
#include "hyprec/precond/schwarz.hpp"
#include "hyprec/util/errors.hpp"

namespace hyprec::cli {

std::shared_ptr<const onet::TrunkBasis> make_basis(const BasisConfig& cfg, int dim) {
    if (cfg.kind == "sine") return std::make_shared<onet::SineBasis>(dim, cfg.p);
    auto model = std::make_shared<const onet::OnetModel>(onet::load_model(cfg.path));
    return std::make_shared<onet::ModelTrunkBasis>(model);
}

namespace {

bool is_helmholtz(const fem::Problem& p) {
    return p.spec.variant == fem::Variant::Helm1D || p.spec.variant == fem::Variant::Helm2D;
}

double wave_number(const fem::Problem& p) {
    const auto it = p.meta.find("k_h");
    return it == p.meta.end() ? p.spec.k_h : it->second;
}

onet::TbOptions tb_options(const Expr& e) {
    onet::TbOptions o;
    o.k = e.count("k", 32);
    o.selection = e.str("select", "random") == "leading" ? onet::ColumnSelection::Leading
                                                         : onet::ColumnSelection::Random;
    o.eps_rel = e.num("eps", 1e-8);
    if (e.name == "tb_sparse" && e.str("smooth", "none") != "none") o.smoothing_gamma = e.num("smooth", 0.0);
    return o;
}

const onet::TrunkBasis& need_basis(const BuildContext& ctx, const std::string& who) {
    if (!ctx.basis) throw ConfigError(who + " needs a trunk basis (config key 'basis')");
    if (ctx.basis->dim() != ctx.problem.mesh.dim)
        throw ConfigError(who + ": basis dimension " + std::to_string(ctx.basis->dim()) +
                          " differs from the mesh dimension " + std::to_string(ctx.problem.mesh.dim));
    return *ctx.basis;
}

using BuildCache = std::map<std::string, Preconditioner>;

Preconditioner build_node(const Expr& e, BuildContext& ctx, BuildCache& cache);

// Identical sub-expressions resolve to one shared object, which is what
// lets a chain like mult(S, C, S) be recognized as symmetric.
Preconditioner build_unweighted(const Expr& e, BuildContext& ctx, BuildCache& cache) {
    Expr key = e;
    key.weight = 1.0;
    const std::string k = key.to_string();
    if (const auto it = cache.find(k); it != cache.end()) return it->second;
    Preconditioner p = build_node(key, ctx, cache);
    cache.emplace(k, p);
    return p;
}

Preconditioner build_node(const Expr& e, BuildContext& ctx, BuildCache& cache) {
    const fem::Problem& pr = ctx.problem;
    const auto& a = pr.a;
    const bool spd = pr.symmetric_positive_definite;
    const std::string& n = e.name;
    const std::string label = e.to_string();

    if (n == "mult" || n == "add") {
        std::vector<WeightedPart> parts;
        for (const auto& c : e.children) parts.push_back({build_unweighted(c, ctx, cache), c.weight});
        return make_composite(a, std::move(parts),
                              n == "mult" ? CompositionMode::Multiplicative : CompositionMode::Additive);
    }
    if (n == "identity") return identity_preconditioner(a->rows());
    if (n == "exact") return exact_inverse(*a, spd);
    if (n == "jacobi") {
        const std::string g = e.str("gamma", "auto");
        const double gamma = g == "auto" ? auto_jacobi_gamma(pr, pr.mesh.h()) : e.num("gamma", 0.0);
        return make_jacobi(a, {gamma, e.count("nu", 1)});
    }
    if (n == "asm") {
        const Partition part = partition_structured(pr.mesh, e.count("S", 1), e.count("overlap", 1));
        return make_asm(a, part, spd);
    }
    if (n == "tb_dense") {
        auto p = onet::tb_dense(need_basis(ctx, n), pr.mesh, tb_options(e), ctx.rng);
        return onet::make_coarse_preconditioner(onet::coarse_build(a, std::move(p)), spd, label);
    }
    if (n == "tb_sparse") {
        const Partition part = partition_structured(pr.mesh, e.count("S", 1), 0);
        auto p = onet::tb_sparse(need_basis(ctx, n), pr.mesh, part, *a, tb_options(e), ctx.rng);
        return onet::make_coarse_preconditioner(onet::coarse_build(a, std::move(p)), spd, label);
    }
    if (n == "mg") {
        MgOptions o;
        o.schedule = parse_schedule(e.str("schedule", ""));
        o.assemble = reassembler(pr);
        o.jacobi_gamma = [&pr](double h) { return auto_jacobi_gamma(pr, h); };
        o.galerkin = e.str("galerkin", "false") == "true";
        o.spd = spd;
        if (std::any_of(o.schedule.begin(), o.schedule.end(), [](const SmootherSpec& s) {
                return s.kind == SmootherSpec::Kind::Composite;
            })) {
            auto basis = ctx.basis;
            need_basis(ctx, "mg M(k) smoother");
            o.composite_factory = [basis, spd](const MgLevelContext& lc) {
                const auto jac = make_jacobi(lc.a, {lc.gamma, lc.spec.steps});
                onet::TbOptions to;
                to.k = lc.spec.coarse_k;
                to.selection = onet::ColumnSelection::Leading;
                Rng unused(0);
                auto coarse = onet::make_coarse_preconditioner(
                    onet::coarse_build(lc.a, onet::tb_dense(*basis, lc.mesh, to, unused)), spd,
                    "tb_dense(k=" + std::to_string(to.k) + ")");
                // J, C, J as one symmetric smoother, used for pre- and post-smoothing.
                const auto m = make_composite(lc.a, {{jac, 1.0}, {coarse, 1.0}, {jac, 1.0}},
                                              CompositionMode::Multiplicative);
                return SmootherPair{m, m};
            };
        }
        return MultigridHierarchy(pr.mesh, std::move(o)).as_preconditioner();
    }
    if (n == "dp") {
        if (!ctx.model) throw ConfigError("dp needs a model file (config key 'model')");
        std::vector<Vector> frozen;
        for (const auto& [name, v] : pr.inputs) frozen.push_back(v);
        if (frozen.size() != ctx.model->nf())
            throw ConfigError("dp: model has " + std::to_string(ctx.model->nf()) +
                              " branches but the problem provides " + std::to_string(frozen.size()) +
                              " inputs");
        auto dctx = std::make_shared<const onet::DpContext>(
            onet::make_dp_context(ctx.model, pr.mesh, frozen));
        return onet::make_dp_preconditioner(dctx);
    }
    throw ConfigError("unknown preconditioner '" + n + "'");
}

} // namespace

double auto_jacobi_gamma(const fem::Problem& problem, double h) {
    if (is_helmholtz(problem)) return jacobi_gamma_helmholtz(wave_number(problem), h);
    return 2.0 / 3.0;
}

std::function<CsrMatrix(const fem::StructuredMesh&)> reassembler(const fem::Problem& problem) {
    auto pr = std::make_shared<const fem::Problem>(problem);
    return [pr](const fem::StructuredMesh& mesh) -> CsrMatrix {
        if (mesh.dim == pr->mesh.dim && mesh.cells == pr->mesh.cells) return *pr->a;
        switch (pr->spec.variant) {
        case fem::Variant::Identity: return CsrMatrix::identity(mesh.num_nodes());
        case fem::Variant::Helm1D:
        case fem::Variant::Helm2D:
            // Coarse levels are under-resolved by design.
            return fem::assemble_helmholtz(mesh, wave_number(*pr), true);
        case fem::Variant::JumpDiff:
            return fem::assemble_diffusion_elementwise(
                mesh, fem::jump_coefficient(mesh, pr->spec, pr->meta.at("channel_k")));
        case fem::Variant::Diff: {
            if (pr->spec.constant_coefficient) {
                const Vector k(mesh.num_nodes(), *pr->spec.constant_coefficient);
                return fem::assemble_diffusion(mesh, k);
            }
            if (pr->mesh.cells % mesh.cells != 0)
                throw std::invalid_argument("reassembler: meshes are not nested");
            // Nested nodes: inject the fine nodal coefficient.
            const Index r = pr->mesh.cells / mesh.cells;
            const Vector& fine_k = pr->inputs.at(0).second;
            const Index m = mesh.cells + 1;
            Vector k(mesh.num_nodes());
            for (std::size_t c = 0; c < k.size(); ++c) {
                const Index i = Index(c) % m, j = (Index(c) / m) % m, l = Index(c) / (m * m);
                k[c] = fine_k[pr->mesh.node_index(i * r, mesh.dim > 1 ? j * r : 0,
                                                  mesh.dim > 2 ? l * r : 0)];
            }
            return fem::assemble_diffusion(mesh, k);
        }
        }
        throw std::invalid_argument("reassembler: unsupported variant");
    };
}

Preconditioner build_preconditioner(const Expr& e, BuildContext& ctx) {
    BuildCache cache;
    Preconditioner p = build_unweighted(e, ctx, cache);
    if (e.weight == 1.0) return p;
    return make_composite(ctx.problem.a, {{p, e.weight}}, CompositionMode::Additive);
}

} // namespace hyprec::cli
