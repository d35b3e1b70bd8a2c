#include "hyprec/cli/commands.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "hyprec/cli/builder.hpp"
#include "hyprec/krylov/solvers.hpp"
#include "hyprec/linalg/banded.hpp"
#include "hyprec/linalg/eig.hpp"
#include "hyprec/onet/onetpack.hpp"
#include "hyprec/onet/transfer.hpp"
#include "hyprec/precond/analysis.hpp"
#include "hyprec/precond/multigrid.hpp"
#include "hyprec/precond/schwarz.hpp"
#include "hyprec/util/errors.hpp"

namespace hyprec::cli {

namespace {

struct Resources {
    std::shared_ptr<const onet::TrunkBasis> basis;
    std::shared_ptr<const onet::OnetModel> model;
};

Resources load_resources(const RunConfig& cfg, const Expr& expr) {
    const std::string text = expr.to_string();
    Resources r;
    // Sine bases are cheap; model files are only read when referenced.
    const bool wants_basis = text.find("tb_") != std::string::npos || text.find("M(") != std::string::npos;
    if (cfg.basis.kind == "sine" || wants_basis)
        r.basis = make_basis(cfg.basis, fem::problem_dim(cfg.problem));
    if (text.find("dp") != std::string::npos && !cfg.model_path.empty())
        r.model = std::make_shared<const onet::OnetModel>(onet::load_model(cfg.model_path));
    return r;
}

StopCriteria stop_for(const RunConfig& cfg, const fem::Problem& p) {
    StopCriteria s = cfg.stop;
    if (!cfg.stop_use_a_norm_set) s.use_a_norm = p.symmetric_positive_definite;
    return s;
}

SolveReport solve_one(const RunConfig& cfg, const fem::Problem& p, const Preconditioner& m,
                      std::uint64_t seed) {
    Rng guess(derive_seed(seed, kGuessStream));
    Vector x0(p.a->rows());
    for (double& v : x0) v = guess.uniform(-1.0, 1.0);
    const StopCriteria stop = stop_for(cfg, p);
    if (cfg.solver.kind == SolverKind::Pcg) return pcg(*p.a, p.rhs, m, x0, stop);
    FgmresOptions o;
    o.restart = cfg.solver.restart;
    o.reorthogonalize = cfg.solver.reorthogonalize;
    return fgmres(*p.a, p.rhs, m, x0, stop, o);
}

void finish_stats(SeedStats& st) {
    const double n = static_cast<double>(st.runs.size());
    double sum = 0.0;
    for (const auto& r : st.runs) {
        sum += static_cast<double>(r.report.iterations);
        if (converged(r.report.termination)) ++st.converged;
    }
    st.mean_iterations = sum / n;
    double var = 0.0;
    for (const auto& r : st.runs) {
        const double d = static_cast<double>(r.report.iterations) - st.mean_iterations;
        var += d * d;
    }
    st.stddev_iterations = std::sqrt(var / n);
}

std::string study_line(const std::string& a, const std::string& b, const StudyRow& r) {
    return a + "," + b + "," + csv_field(r.expression) + "," + format_double(r.stats.mean_iterations) +
           "," + format_double(r.stats.stddev_iterations) + "," + std::to_string(r.stats.converged) +
           "," + std::to_string(r.stats.runs.size()) + "\n";
}

} // namespace

fem::Problem problem_for_seed(fem::ProblemFactory& factory, std::uint64_t seed) {
    Rng rng(derive_seed(seed, kProblemStream));
    return factory.build(rng);
}

SeedStats run_seeds(const RunConfig& cfg, const std::string& expr_text) {
    const Expr expr = parse_expr(expr_text);
    check_solver_compat(expr, cfg.solver, cfg.problem);
    if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
    const Resources res = load_resources(cfg, expr);

    fem::ProblemFactory factory(cfg.problem);
    std::vector<fem::Problem> problems;
    for (auto seed : cfg.seeds) problems.push_back(problem_for_seed(factory, seed));

    const std::size_t ns = cfg.seeds.size();
    SeedStats st;
    st.runs.resize(ns);
    std::vector<std::exception_ptr> errors(ns);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < ns; ++i) {
        try {
            const std::uint64_t seed = cfg.seeds[i];
            Rng rng(derive_seed(seed, kBuildStream));
            BuildContext ctx{problems[i], rng, res.basis, res.model};
            const Preconditioner m = build_preconditioner(expr, ctx);
            st.runs[i] = {seed, solve_one(cfg, problems[i], m, seed)};
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    finish_stats(st);
    return st;
}

std::string format_solve_csv(const RunConfig& cfg, const std::string& expr_text,
                             const SeedStats& st) {
    const std::string prob = csv_field(problem_label(cfg.problem));
    const std::string prec = parse_expr(expr_text).to_string();
    std::string out = csv_header() + "\n";
    double mean_res = 0.0;
    for (const auto& r : st.runs) {
        out += csv_row(r.seed, problem_label(cfg.problem), prec, r.report) + "\n";
        mean_res += r.report.final_relative_residual;
    }
    mean_res /= static_cast<double>(st.runs.size());
    double var_res = 0.0;
    for (const auto& r : st.runs) {
        const double d = r.report.final_relative_residual - mean_res;
        var_res += d * d;
    }
    const std::string conv =
        std::to_string(st.converged) + "/" + std::to_string(st.runs.size()) + "_converged";
    out += "mean," + prob + "," + csv_field(prec) + "," + format_double(st.mean_iterations) + "," +
           conv + "," + format_double(mean_res) + "\n";
    out += "stddev," + prob + "," + csv_field(prec) + "," + format_double(st.stddev_iterations) +
           "," + conv + "," + format_double(std::sqrt(var_res / st.runs.size())) + "\n";
    return out;
}

EigenStudy run_eigen_study(const RunConfig& cfg) {
    if (cfg.preconditioners.empty()) throw ConfigError("eigen-study needs 'preconditioners'");
    std::vector<Expr> exprs;
    for (const auto& t : cfg.preconditioners) {
        exprs.push_back(parse_expr(t));
        if (!type_check(exprs.back(), problem_is_spd(cfg.problem)).linear)
            throw ConfigError("eigen-study: '" + t + "' is nonlinear and has no dense capture");
    }
    fem::ProblemFactory factory(cfg.problem);
    const std::uint64_t seed = cfg.seeds.front();
    const fem::Problem p = problem_for_seed(factory, seed);
    if (p.a->rows() > kMaxDenseCapture)
        throw ConfigError("eigen-study: n = " + std::to_string(p.a->rows()) + " exceeds the dense limit");
    const auto interior = fem::interior_nodes(p.mesh);
    const DenseMatrix a_int = restrict_dense(p.a->to_dense(), interior);
    const EigResult eig = sym_eig(a_int);

    EigenStudy s;
    s.eigenvalues = eig.values;
    s.modes = eig.vectors;
    Resources res;
    for (const auto& e : exprs) {
        const Resources r = load_resources(cfg, e);
        if (r.basis) res.basis = r.basis;
    }
    for (const auto& e : exprs) {
        Rng rng(derive_seed(seed, kBuildStream));
        BuildContext ctx{p, rng, res.basis, res.model};
        const Preconditioner m = build_preconditioner(e, ctx);
        const DenseMatrix ei = restrict_dense(error_propagation_dense(*p.a, m), interior);
        s.labels.push_back(e.to_string());
        s.amplification.push_back(mode_amplification(ei, eig.vectors));
        s.rayleigh.push_back(mode_rayleigh(ei, eig.vectors));
    }
    return s;
}

std::string format_eigen_csv(const EigenStudy& s) {
    std::string out = "mode,eigenvalue";
    for (const auto& l : s.labels) out += "," + csv_field("amp:" + l) + "," + csv_field("rayleigh:" + l);
    out += "\n";
    for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
        out += std::to_string(j) + "," + format_double(s.eigenvalues[j]);
        for (std::size_t q = 0; q < s.labels.size(); ++q)
            out += "," + format_double(s.amplification[q][j]) + "," + format_double(s.rayleigh[q][j]);
        out += "\n";
    }
    return out;
}

std::vector<StudyRow> run_mg_study(const RunConfig& cfg) {
    if (cfg.schedules.empty()) throw ConfigError("mg-study needs 'schedules'");
    std::vector<StudyRow> rows;
    for (const auto& sched : cfg.schedules) {
        const auto parsed = parse_schedule(sched);
        Expr e;
        e.name = "mg";
        e.params["schedule"] = schedule_to_string(parsed);
        if (cfg.galerkin) e.params["galerkin"] = "true";
        StudyRow r{schedule_to_string(parsed), parsed.size(), e.to_string(), {}};
        r.stats = run_seeds(cfg, r.expression);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_mg_csv(const std::vector<StudyRow>& rows) {
    std::string out = "levels,schedule,preconditioner,mean_iterations,stddev_iterations,converged,runs\n";
    for (const auto& r : rows) out += study_line(std::to_string(r.size), csv_field(r.key), r);
    return out;
}

std::vector<StudyRow> run_asm_study(const RunConfig& cfg) {
    if (cfg.subdomains.empty()) throw ConfigError("asm-study needs 'subdomains'");
    std::vector<StudyRow> rows;
    for (const auto& coarse : cfg.coarse) {
        for (const std::size_t s : cfg.subdomains) {
            Expr local;
            local.name = "asm";
            local.params = {{"S", std::to_string(s)}, {"overlap", std::to_string(cfg.overlap)}};
            Expr full = local;
            if (coarse != "none") {
                Expr c = parse_expr(coarse);
                if (c.name == "tb_sparse" && !c.has("S")) c.params["S"] = std::to_string(s);
                full = Expr{};
                full.name = "add";
                full.children = {local, c};
            }
            StudyRow r{coarse, s, full.to_string(), {}};
            r.stats = run_seeds(cfg, r.expression);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::string format_asm_csv(const std::vector<StudyRow>& rows) {
    std::string out = "subdomains,coarse,preconditioner,mean_iterations,stddev_iterations,converged,runs\n";
    for (const auto& r : rows) out += study_line(std::to_string(r.size), csv_field(r.key), r);
    return out;
}

io::TensorPack generate_dataset(const fem::ProblemSpec& spec, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw ConfigError("gen-dataset: need at least one sample");
    fem::ProblemFactory factory(spec);
    const auto& mesh = factory.mesh();
    const std::size_t n = mesh.num_nodes();
    const std::uint64_t base = derive_seed(seed, kDatasetStream);

    std::vector<std::string> names;
    std::vector<Vector> inputs;
    Vector targets, rhs;
    targets.reserve(samples * n);
    rhs.reserve(samples * n);
    for (std::size_t j = 0; j < samples; ++j) {
        Rng rng(derive_seed(base, j));
        const fem::Problem p = factory.build(rng);
        Vector u;
        try {
            u = BandedLu(*p.a).solve(p.rhs);
        } catch (const std::exception& e) {
            throw std::runtime_error("gen-dataset: sample " + std::to_string(j) + ": " + e.what());
        }
        const double fn = norm2(p.rhs);
        const double res = norm2(subtract(spmv(*p.a, u), p.rhs));
        if (res > 1e-11 * fn && res > 1e-300)
            throw std::runtime_error("gen-dataset: sample " + std::to_string(j) +
                                     " target residual " + format_double(res / fn));
        if (j == 0) {
            for (const auto& [name, v] : p.inputs) {
                names.push_back(name);
                inputs.emplace_back();
                inputs.back().reserve(samples * v.size());
            }
        }
        for (std::size_t l = 0; l < p.inputs.size(); ++l)
            inputs[l].insert(inputs[l].end(), p.inputs[l].second.begin(), p.inputs[l].second.end());
        targets.insert(targets.end(), u.begin(), u.end());
        rhs.insert(rhs.end(), p.rhs.begin(), p.rhs.end());
    }
    io::TensorPack pack;
    for (std::size_t l = 0; l < names.size(); ++l) {
        const std::uint64_t width = inputs[l].size() / samples;
        pack.add_f64("input/" + names[l], {samples, width}, std::move(inputs[l]));
    }
    pack.add_f64("coords", {n, std::uint64_t(mesh.dim)},
                 Vector(mesh.coords.data().begin(), mesh.coords.data().end()));
    pack.add_f64("targets", {samples, n}, std::move(targets));
    pack.add_f64("rhs", {samples, n}, std::move(rhs));
    pack.add_i8("dirichlet_mask", {n}, std::vector<std::int8_t>(mesh.dirichlet.begin(), mesh.dirichlet.end()));
    pack.meta() = {{"kind", "dataset"},
                   {"problem", problem_to_json(spec)},
                   {"samples", samples},
                   {"seed", seed},
                   {"inputs", names}};
    return pack;
}

VerifyResult verify_dataset(const io::TensorPack& pack, std::size_t max_samples, double tol) {
    VerifyResult r;
    const auto& meta = pack.meta();
    if (!meta.contains("problem") || !meta.contains("samples") || !meta.contains("seed"))
        throw FormatError("verify-dataset: meta lacks problem/samples/seed");
    const fem::ProblemSpec spec = parse_problem(meta.at("problem"));
    const std::size_t samples = meta.at("samples").get<std::size_t>();
    const std::uint64_t base = derive_seed(meta.at("seed").get<std::uint64_t>(), kDatasetStream);
    const auto& targets = pack.f64("targets");
    const auto& rhs = pack.f64("rhs");
    fem::ProblemFactory factory(spec);
    const std::size_t n = factory.mesh().num_nodes();
    if (targets.size() != samples * n || rhs.size() != samples * n)
        throw FormatError("verify-dataset: tensor sizes do not match the problem");
    const std::size_t count = max_samples == 0 ? samples : std::min(samples, max_samples);
    for (std::size_t j = 0; j < count; ++j) {
        Rng rng(derive_seed(base, j));
        const fem::Problem p = factory.build(rng);
        const std::span<const double> u(targets.data() + j * n, n);
        const std::span<const double> f(rhs.data() + j * n, n);
        if (!std::equal(f.begin(), f.end(), p.rhs.begin())) ++r.rhs_mismatches;
        const double fn = norm2(f);
        const double res = norm2(subtract(spmv(*p.a, u), f));
        r.max_rel_residual = std::max(r.max_rel_residual, fn > 0.0 ? res / fn : res);
        ++r.checked;
    }
    r.ok = r.rhs_mismatches == 0 && r.max_rel_residual < tol;
    return r;
}

io::TensorPack dump_basis(const RunConfig& cfg, std::uint64_t seed) {
    const Expr e = parse_expr(cfg.preconditioner);
    if (e.name != "tb_dense" && e.name != "tb_sparse")
        throw ConfigError("dump-basis: preconditioner must be a tb_dense or tb_sparse expression");
    type_check(e, problem_is_spd(cfg.problem));
    fem::ProblemFactory factory(cfg.problem);
    const fem::Problem p = problem_for_seed(factory, seed);
    const auto basis = make_basis(cfg.basis, p.mesh.dim);
    Rng rng(derive_seed(seed, kBuildStream));
    onet::TbOptions o;
    o.k = e.count("k", 32);
    o.selection = e.str("select", "random") == "leading" ? onet::ColumnSelection::Leading
                                                         : onet::ColumnSelection::Random;
    o.eps_rel = e.num("eps", 1e-8);
    onet::Prolongation pr;
    if (e.name == "tb_dense") {
        pr = onet::tb_dense(*basis, p.mesh, o, rng);
    } else {
        if (e.str("smooth", "none") != "none") o.smoothing_gamma = e.num("smooth", 0.0);
        pr = onet::tb_sparse(*basis, p.mesh, partition_structured(p.mesh, e.count("S", 1), 0), *p.a,
                             o, rng);
    }
    io::TensorPack pack;
    const DenseMatrix pd = pr.p.to_dense();
    pack.add_f64("P", {pd.rows(), pd.cols()}, Vector(pd.data().begin(), pd.data().end()));
    pack.add_f64("coords", {p.mesh.num_nodes(), std::uint64_t(p.mesh.dim)},
                 Vector(p.mesh.coords.data().begin(), p.mesh.coords.data().end()));
    pack.add_i8("dirichlet_mask", {p.mesh.num_nodes()},
                std::vector<std::int8_t>(p.mesh.dirichlet.begin(), p.mesh.dirichlet.end()));
    std::vector<std::int64_t> cols(pr.provenance.columns.begin(), pr.provenance.columns.end());
    const std::uint64_t ncols = cols.size();
    pack.add_i64("columns", {ncols}, std::move(cols));
    pack.meta() = {{"kind", "basis"},
                   {"basis", pr.provenance.basis_id},
                   {"expression", e.to_string()},
                   {"eps_rel", pr.provenance.eps_rel},
                   {"kept_per_block", pr.provenance.kept_per_block},
                   {"seed", seed}};
    if (pr.provenance.smoothing_gamma) pack.meta()["smoothing_gamma"] = *pr.provenance.smoothing_gamma;
    return pack;
}

io::TensorPack problem_to_tensorpack(const fem::Problem& p) {
    io::TensorPack pack;
    const auto& a = *p.a;
    pack.add_i64("row_ptr", {a.row_ptr().size()}, a.row_ptr());
    pack.add_i64("col_idx", {a.col_idx().size()}, a.col_idx());
    pack.add_f64("vals", {a.values().size()}, a.values());
    pack.add_f64("rhs", {p.rhs.size()}, p.rhs);
    pack.add_f64("coords", {p.mesh.num_nodes(), std::uint64_t(p.mesh.dim)},
                 Vector(p.mesh.coords.data().begin(), p.mesh.coords.data().end()));
    pack.add_i8("dirichlet_mask", {p.mesh.num_nodes()},
                std::vector<std::int8_t>(p.mesh.dirichlet.begin(), p.mesh.dirichlet.end()));
    nlohmann::json meta{{"kind", "problem"}, {"problem", problem_to_json(p.spec)}, {"n", a.rows()}};
    for (const auto& [k, v] : p.meta) meta["params"][k] = v;
    pack.meta() = meta;
    return pack;
}

} // namespace hyprec::cli
