#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyprec/cli/expr.hpp"
#include "hyprec/fem/problem.hpp"
#include "hyprec/krylov/report.hpp"

namespace hyprec::cli {

enum class SolverKind { Pcg, Fgmres };

struct SolverConfig {
    SolverKind kind = SolverKind::Pcg;
    std::size_t restart = 50;
    bool reorthogonalize = false;
};

/// Source of trunk functions for tb_* coarse spaces and M(k) smoothers.
struct BasisConfig {
    std::string kind = "sine"; ///< "sine" or "model"
    std::size_t p = 128;       ///< sine only
    std::string path;          ///< model only
};

/// One JSON run file. Every key is optional except where a subcommand
/// needs it; unknown keys are rejected so typos surface early.
///
/// {
///   "problem": {"variant": "Diff", "dim": 2, "level": 1, ...},
///   "solver": {"type": "pcg" | "fgmres", "restart": 50, "reorthogonalize": false},
///   "preconditioner": "mult(jacobi(nu=3), tb_dense(k=32), jacobi(nu=3))",
///   "seeds": [0, 1, ...] | <count>,
///   "stop": {"abs_res", "a_norm_increment", "rel_res", "max_iters", "use_a_norm"},
///   "basis": {"kind": "sine", "p": 128} | {"kind": "model", "path": "..."},
///   "model": "dp-model.onpk",
///   "output": "report.csv",
///   "preconditioners": [...],          // eigen-study
///   "schedules": ["J J D", ...],       // mg-study
///   "galerkin": false,                 // mg-study
///   "subdomains": [4, 16, 64],         // asm-study
///   "overlap": 1,                      // asm-study
///   "coarse": ["none", "tb_sparse(k=8, smooth=0.6667)"]  // asm-study
/// }
struct RunConfig {
    fem::ProblemSpec problem;
    SolverConfig solver;
    std::string preconditioner = "identity";
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    StopCriteria stop;
    bool stop_use_a_norm_set = false; ///< otherwise the A-norm test follows problem SPD-ness
    BasisConfig basis;
    std::string model_path;
    std::string output;

    std::vector<std::string> preconditioners;
    std::vector<std::string> schedules;
    bool galerkin = false;
    std::vector<std::size_t> subdomains{4, 16, 64};
    std::size_t overlap = 1;
    std::vector<std::string> coarse{"none"};
};

fem::ProblemSpec parse_problem(const nlohmann::json& j);
nlohmann::json problem_to_json(const fem::ProblemSpec& spec);

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Whether the assembled operator is SPD, known from the spec alone.
bool problem_is_spd(const fem::ProblemSpec& spec);

/// Short problem id used in reports, e.g. "Diff(d=2,cells=39)".
std::string problem_label(const fem::ProblemSpec& spec);

/// Type-checks `expr` for `solver` on `problem`; PCG needs a linear SPD
/// preconditioner and an SPD operator. Throws ConfigError.
void check_solver_compat(const Expr& expr, const SolverConfig& solver,
                         const fem::ProblemSpec& problem);

} // namespace hyprec::cli
