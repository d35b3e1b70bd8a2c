#include "hyprec/cli/config.hpp"

#include <fstream>
#include <set>

#include "hyprec/util/errors.hpp"

namespace hyprec::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

fem::GrfParams parse_grf(const json& j, fem::GrfParams g, const std::string& where) {
    reject_unknown(j, {"mean", "sigma", "ell"}, where);
    read(j, "mean", g.mean, where);
    read(j, "sigma", g.sigma, where);
    read(j, "ell", g.ell, where);
    return g;
}

json grf_json(const fem::GrfParams& g) { return {{"mean", g.mean}, {"sigma", g.sigma}, {"ell", g.ell}}; }

} // namespace

fem::ProblemSpec parse_problem(const json& j) {
    const std::string w = "problem";
    reject_unknown(j,
                   {"variant", "dim", "cells", "level", "coefficient", "forcing",
                    "constant_coefficient", "channels", "channel_snap_cells", "channel_k",
                    "log10_k_max", "k_h", "auto_k_h", "allow_underresolved", "squared_distance",
                    "helm_forcing"},
                   w);
    fem::ProblemSpec s;
    if (j.contains("variant")) {
        try {
            s.variant = fem::variant_from_string(j.at("variant").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(w + ".variant: " + e.what());
        }
    }
    read(j, "dim", s.dim, w);
    read(j, "cells", s.cells, w);
    read(j, "level", s.level, w);
    if (j.contains("coefficient")) s.coefficient = parse_grf(j["coefficient"], s.coefficient, w + ".coefficient");
    if (j.contains("forcing")) s.forcing = parse_grf(j["forcing"], s.forcing, w + ".forcing");
    if (j.contains("helm_forcing"))
        s.helm_forcing = parse_grf(j["helm_forcing"], s.helm_forcing, w + ".helm_forcing");
    if (j.contains("constant_coefficient")) {
        double c = 0.0;
        read(j, "constant_coefficient", c, w);
        s.constant_coefficient = c;
    }
    if (j.contains("channels")) {
        s.channels.clear();
        for (const auto& b : j["channels"]) {
            const auto v = b.get<std::vector<double>>();
            if (v.size() != 4) throw ConfigError(w + ".channels: each box is [x0, x1, y0, y1]");
            s.channels.push_back({v[0], v[1], v[2], v[3]});
        }
    }
    read(j, "channel_snap_cells", s.channel_snap_cells, w);
    if (j.contains("channel_k")) {
        double c = 0.0;
        read(j, "channel_k", c, w);
        s.channel_k = c;
    }
    read(j, "log10_k_max", s.log10_k_max, w);
    read(j, "k_h", s.k_h, w);
    // An explicit wave number switches the level rule off unless asked for.
    s.auto_k_h = !j.contains("k_h");
    read(j, "auto_k_h", s.auto_k_h, w);
    read(j, "allow_underresolved", s.allow_underresolved, w);
    read(j, "squared_distance", s.squared_distance, w);
    if (s.dim < 1 || s.dim > 3) throw ConfigError(w + ".dim must be 1, 2 or 3");
    if (s.cells < 0) throw ConfigError(w + ".cells must be non-negative");
    if (s.level < 1) throw ConfigError(w + ".level must be >= 1");
    return s;
}

json problem_to_json(const fem::ProblemSpec& s) {
    json channels = json::array();
    for (const auto& b : s.channels) channels.push_back({b.x0, b.x1, b.y0, b.y1});
    json j{{"variant", fem::to_string(s.variant)},
           {"dim", s.dim},
           {"cells", s.cells},
           {"level", s.level},
           {"coefficient", grf_json(s.coefficient)},
           {"forcing", grf_json(s.forcing)},
           {"helm_forcing", grf_json(s.helm_forcing)},
           {"channels", channels},
           {"channel_snap_cells", s.channel_snap_cells},
           {"log10_k_max", s.log10_k_max},
           {"k_h", s.k_h},
           {"auto_k_h", s.auto_k_h},
           {"allow_underresolved", s.allow_underresolved},
           {"squared_distance", s.squared_distance}};
    if (s.constant_coefficient) j["constant_coefficient"] = *s.constant_coefficient;
    if (s.channel_k) j["channel_k"] = *s.channel_k;
    return j;
}

RunConfig parse_config(const json& j) {
    reject_unknown(j,
                   {"problem", "solver", "preconditioner", "seeds", "stop", "basis", "model",
                    "output", "preconditioners", "schedules", "galerkin", "subdomains", "overlap",
                    "coarse"},
                   "config");
    RunConfig c;
    if (j.contains("problem")) c.problem = parse_problem(j["problem"]);
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        reject_unknown(s, {"type", "restart", "reorthogonalize"}, "solver");
        std::string type = "pcg";
        read(s, "type", type, "solver");
        if (type == "pcg") c.solver.kind = SolverKind::Pcg;
        else if (type == "fgmres") c.solver.kind = SolverKind::Fgmres;
        else throw ConfigError("solver.type must be 'pcg' or 'fgmres'");
        read(s, "restart", c.solver.restart, "solver");
        read(s, "reorthogonalize", c.solver.reorthogonalize, "solver");
        if (c.solver.restart < 1) throw ConfigError("solver.restart must be >= 1");
    }
    read(j, "preconditioner", c.preconditioner, "config");
    if (j.contains("seeds")) {
        const auto& s = j["seeds"];
        if (s.is_number_integer()) {
            if (s.get<std::int64_t>() < 0) throw ConfigError("seeds: count must be non-negative");
            c.seeds.clear();
            for (std::uint64_t i = 0; i < s.get<std::uint64_t>(); ++i) c.seeds.push_back(i);
        } else {
            read(j, "seeds", c.seeds, "config");
        }
        if (c.seeds.empty()) throw ConfigError("seeds must be nonempty");
    }
    if (j.contains("stop")) {
        const auto& s = j["stop"];
        reject_unknown(s, {"abs_res", "a_norm_increment", "rel_res", "max_iters", "use_a_norm"},
                       "stop");
        read(s, "abs_res", c.stop.abs_res, "stop");
        read(s, "a_norm_increment", c.stop.a_norm_increment, "stop");
        read(s, "rel_res", c.stop.rel_res, "stop");
        read(s, "max_iters", c.stop.max_iters, "stop");
        if (s.contains("use_a_norm")) {
            read(s, "use_a_norm", c.stop.use_a_norm, "stop");
            c.stop_use_a_norm_set = true;
        }
        try {
            c.stop.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (j.contains("basis")) {
        const auto& b = j["basis"];
        reject_unknown(b, {"kind", "p", "path"}, "basis");
        read(b, "kind", c.basis.kind, "basis");
        read(b, "p", c.basis.p, "basis");
        read(b, "path", c.basis.path, "basis");
        if (c.basis.kind != "sine" && c.basis.kind != "model")
            throw ConfigError("basis.kind must be 'sine' or 'model'");
        if (c.basis.kind == "model" && c.basis.path.empty())
            throw ConfigError("basis.path is required for a model basis");
    }
    read(j, "model", c.model_path, "config");
    read(j, "output", c.output, "config");
    read(j, "preconditioners", c.preconditioners, "config");
    read(j, "schedules", c.schedules, "config");
    read(j, "galerkin", c.galerkin, "config");
    read(j, "subdomains", c.subdomains, "config");
    read(j, "overlap", c.overlap, "config");
    read(j, "coarse", c.coarse, "config");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

bool problem_is_spd(const fem::ProblemSpec& s) {
    switch (s.variant) {
    case fem::Variant::Helm1D: return s.k_h == 0.0;
    case fem::Variant::Helm2D: return !s.auto_k_h && s.k_h == 0.0;
    default: return true;
    }
}

std::string problem_label(const fem::ProblemSpec& s) {
    std::string out = fem::to_string(s.variant) + "(d=" + std::to_string(fem::problem_dim(s)) +
                      ",cells=" + std::to_string(s.resolved_cells());
    if (s.variant == fem::Variant::Helm1D || (s.variant == fem::Variant::Helm2D && !s.auto_k_h))
        out += ",k=" + format_double(s.k_h);
    return out + ")";
}

void check_solver_compat(const Expr& expr, const SolverConfig& solver,
                         const fem::ProblemSpec& problem) {
    const bool spd_op = problem_is_spd(problem);
    const ExprType t = type_check(expr, spd_op);
    if (solver.kind == SolverKind::Pcg) {
        if (!spd_op) throw ConfigError("pcg needs an SPD operator; use fgmres for this problem");
        if (!t.linear)
            throw ConfigError("pcg needs a linear preconditioner; '" + expr.to_string() +
                              "' is nonlinear, use fgmres");
        if (!t.spd)
            throw ConfigError("pcg needs an SPD preconditioner; '" + expr.to_string() +
                              "' is not (a multiplicative chain must read the same backwards)");
    }
}

} // namespace hyprec::cli
