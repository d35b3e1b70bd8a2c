#include "hyprec/onet/dp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hyprec/fem/assemble.hpp"
#include "hyprec/util/errors.hpp"

namespace hyprec::onet {

CsrMatrix sensor_interpolation(const fem::StructuredMesh& mesh, const DenseMatrix& points) {
    const int d = mesh.dim;
    if (static_cast<int>(points.cols()) != d)
        throw DimensionError("sensor_interpolation: sensor and mesh dimensions differ");
    const double cells = static_cast<double>(mesh.cells);
    std::vector<Triplet> t;
    for (std::size_t s = 0; s < points.rows(); ++s) {
        Index cell[3] = {0, 0, 0};
        double w[3] = {0, 0, 0};
        for (int a = 0; a < d; ++a) {
            const double x = points(s, a);
            if (!(x >= -1e-12 && x <= 1.0 + 1e-12))
                throw std::out_of_range("sensor " + std::to_string(s) + " lies outside the mesh");
            const double u = std::clamp(x, 0.0, 1.0) * cells;
            cell[a] = std::min<Index>(static_cast<Index>(std::floor(u)), mesh.cells - 1);
            w[a] = u - static_cast<double>(cell[a]);
        }
        for (int corner = 0; corner < (1 << d); ++corner) {
            double weight = 1.0;
            Index ix[3] = {0, 0, 0};
            for (int a = 0; a < d; ++a) {
                const int bit = (corner >> a) & 1;
                weight *= bit ? w[a] : 1.0 - w[a];
                ix[a] = cell[a] + bit;
            }
            if (weight != 0.0)
                t.push_back({Index(s), mesh.node_index(ix[0], ix[1], ix[2]), weight});
        }
    }
    return CsrMatrix::from_triplets(points.rows(), mesh.num_nodes(), std::move(t));
}

DpContext make_dp_context(std::shared_ptr<const OnetModel> model, const fem::StructuredMesh& mesh,
                          const std::vector<Vector>& frozen_inputs) {
    if (!model) throw std::invalid_argument("make_dp_context: null model");
    const OnetModel& m = *model;
    if (frozen_inputs.size() != m.nf())
        throw DimensionError("make_dp_context: expected one input slot per branch (" +
                             std::to_string(m.nf()) + ")");
    DpContext ctx;
    ctx.rhs_branch = m.rhs_branch.value_or(0);
    const auto& sensors = m.branches[ctx.rhs_branch].sensors;
    if (sensors.dim != mesh.dim)
        throw DimensionError("make_dp_context: rhs branch sensors are not on the mesh domain");
    ctx.restriction = sensor_interpolation(mesh, sensors.coords);
    const Vector lumped = fem::lump_mass(mesh);
    ctx.inv_lumped.resize(lumped.size());
    for (std::size_t i = 0; i < lumped.size(); ++i) ctx.inv_lumped[i] = 1.0 / lumped[i];
    ctx.trunk_rows = trunk_eval(m, mesh.coords);
    ctx.frozen_coefficient.assign(m.p, 1.0);
    for (std::size_t l = 0; l < m.nf(); ++l) {
        if (l == ctx.rhs_branch) continue;
        const Vector b = branch_eval(m, l, frozen_inputs[l]);
        for (std::size_t k = 0; k < m.p; ++k) ctx.frozen_coefficient[k] *= b[k];
    }
    ctx.model = std::move(model);
    return ctx;
}

Vector dp_apply(const DpContext& ctx, std::span<const double> v) {
    if (v.size() != ctx.inv_lumped.size()) throw DimensionError("dp_apply: length mismatch");
    Vector scaled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = v[i] * ctx.inv_lumped[i];
    const Vector y = spmv(ctx.restriction, scaled);
    Vector coeff = branch_eval(*ctx.model, ctx.rhs_branch, y);
    for (std::size_t k = 0; k < coeff.size(); ++k) coeff[k] *= ctx.frozen_coefficient[k];
    return contract(ctx.trunk_rows, coeff);
}

Preconditioner make_dp_preconditioner(std::shared_ptr<const DpContext> ctx) {
    const std::size_t n = ctx->inv_lumped.size();
    return Preconditioner(
        n, [ctx](std::span<const double> v) { return dp_apply(*ctx, v); }, PrecFlags{false, false},
        "dp(" + (ctx->model->id.empty() ? std::string("onet") : ctx->model->id) + ")");
}

} // namespace hyprec::onet
