#include "hyprec/fem/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hyprec/fem/assemble.hpp"

namespace hyprec::fem {

std::string to_string(Variant v) {
    switch (v) {
    case Variant::Diff: return "diff";
    case Variant::JumpDiff: return "jumpdiff";
    case Variant::Helm1D: return "helm1d";
    case Variant::Helm2D: return "helm2d";
    case Variant::Identity: return "identity";
    }
    return "unknown";
}

Variant variant_from_string(const std::string& raw) {
    std::string name = raw;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name == "diff") return Variant::Diff;
    if (name == "jumpdiff") return Variant::JumpDiff;
    if (name == "helm1d") return Variant::Helm1D;
    if (name == "helm2d") return Variant::Helm2D;
    if (name == "identity") return Variant::Identity;
    throw std::invalid_argument("unknown problem variant '" + raw + "'");
}

double helm2d_sigma(int level) { return 0.8 / std::pow(2.0, level - 2); }

double helm2d_min_k(int level) { return std::pow(2.0, level - 2) * std::numbers::pi / 1.6; }

Vector jump_coefficient(const StructuredMesh& mesh, const ProblemSpec& spec, double channel_k) {
    if (mesh.dim != 2) throw std::invalid_argument("jumpdiff is defined in 2D");
    const double snap = static_cast<double>(spec.channel_snap_cells);
    auto snapped = [&](double x) { return std::round(x * snap) / snap; };
    Vector k(mesh.num_elements(), 1.0);
    for (std::size_t el = 0; el < mesh.num_elements(); ++el) {
        double cx = 0.0, cy = 0.0;
        for (int a = 0; a < 3; ++a) {
            cx += mesh.coords(mesh.elements[el][a], 0) / 3.0;
            cy += mesh.coords(mesh.elements[el][a], 1) / 3.0;
        }
        for (const auto& b : spec.channels)
            if (cx > snapped(b.x0) && cx < snapped(b.x1) && cy > snapped(b.y0) &&
                cy < snapped(b.y1))
                k[el] = channel_k;
    }
    return k;
}

int problem_dim(const ProblemSpec& spec) {
    switch (spec.variant) {
    case Variant::Helm1D: return 1;
    case Variant::JumpDiff:
    case Variant::Helm2D: return 2;
    default: return spec.dim;
    }
}

Index ProblemSpec::resolved_cells() const {
    if (cells > 0) return cells;
    const int d = problem_dim(*this);
    if (d == 1) throw std::invalid_argument("1D problems need an explicit cell count");
    return cells_for_level(d, level);
}

ProblemFactory::ProblemFactory(ProblemSpec spec)
    : spec_(std::move(spec)),
      mesh_(build_mesh(problem_dim(spec_), spec_.resolved_cells())),
      coefficient_(GrfParams{0.0, spec_.coefficient.sigma, spec_.coefficient.ell}),
      forcing_(spec_.variant == Variant::Helm1D ? spec_.helm_forcing : spec_.forcing) {}

Problem ProblemFactory::build(Rng& rng) {
    Problem p;
    p.spec = spec_;
    p.mesh = mesh_;
    const auto& mesh = p.mesh;
    const std::size_t n = mesh.num_nodes();

    switch (spec_.variant) {
    case Variant::Identity: {
        p.a = std::make_shared<CsrMatrix>(CsrMatrix::identity(n));
        p.rhs.resize(n);
        for (double& v : p.rhs) v = rng.uniform(-1.0, 1.0);
        break;
    }
    case Variant::Diff: {
        Vector k(n);
        if (spec_.constant_coefficient) {
            k.assign(n, *spec_.constant_coefficient);
        } else {
            // Log-normal field whose mean is coefficient.mean.
            const double s = spec_.coefficient.sigma;
            const double mu = std::log(spec_.coefficient.mean) - 0.5 * s * s;
            const Vector g = coefficient_.sample(mesh.coords, rng);
            for (std::size_t i = 0; i < n; ++i) k[i] = std::exp(mu + g[i]);
        }
        const Vector f = forcing_.sample(mesh.coords, rng);
        p.a = std::make_shared<CsrMatrix>(assemble_diffusion(mesh, k));
        p.rhs = load_vector(mesh, f);
        p.inputs = {{"coefficient", k}, {"forcing", f}};
        break;
    }
    case Variant::JumpDiff: {
        double kc = 0.0;
        if (spec_.channel_k) {
            kc = *spec_.channel_k;
        } else {
            kc = std::pow(10.0, rng.uniform(0.0, spec_.log10_k_max));
        }
        p.meta["channel_k"] = kc;
        Vector f(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = mesh.coords(i, 0), y = mesh.coords(i, 1);
            f[i] = std::sin(4 * std::numbers::pi * x) * std::sin(2 * std::numbers::pi * y) *
                   std::sin(2 * std::numbers::pi * x * y);
        }
        p.a = std::make_shared<CsrMatrix>(
            assemble_diffusion_elementwise(mesh, jump_coefficient(mesh, spec_, kc)));
        p.rhs = load_vector(mesh, f);
        p.inputs = {{"log10_k", Vector{std::log10(kc)}}};
        break;
    }
    case Variant::Helm1D: {
        const Vector f = forcing_.sample(mesh.coords, rng);
        p.a = std::make_shared<CsrMatrix>(
            assemble_helmholtz(mesh, spec_.k_h, spec_.allow_underresolved));
        p.rhs = load_vector(mesh, f);
        p.meta["k_h"] = spec_.k_h;
        p.inputs = {{"forcing", f}};
        p.symmetric_positive_definite = spec_.k_h == 0.0;
        break;
    }
    case Variant::Helm2D: {
        const double sigma = helm2d_sigma(spec_.level);
        const double k = spec_.auto_k_h ? helm2d_min_k(spec_.level) : spec_.k_h;
        const double tx = rng.uniform(), ty = rng.uniform();
        Vector f(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = mesh.coords(i, 0) - tx, dy = mesh.coords(i, 1) - ty;
            const double d2 = dx * dx + dy * dy;
            const double dist = spec_.squared_distance ? d2 : std::sqrt(d2);
            f[i] = std::exp(-0.5 * dist / (sigma * sigma));
        }
        p.a = std::make_shared<CsrMatrix>(
            assemble_helmholtz(mesh, k, spec_.allow_underresolved));
        p.rhs = load_vector(mesh, f);
        p.meta["theta_x"] = tx;
        p.meta["theta_y"] = ty;
        p.meta["k_h"] = k;
        p.meta["sigma_h"] = sigma;
        p.inputs = {{"theta", Vector{tx, ty}}};
        p.symmetric_positive_definite = k == 0.0;
        break;
    }
    }
    return p;
}

Problem build_problem(const ProblemSpec& spec, Rng& rng) {
    ProblemFactory factory(spec);
    return factory.build(rng);
}

} // namespace hyprec::fem
