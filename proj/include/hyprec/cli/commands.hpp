#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyprec/cli/config.hpp"
#include "hyprec/fem/problem.hpp"
#include "hyprec/io/tensorpack.hpp"
#include "hyprec/krylov/report.hpp"

namespace hyprec::cli {

/// RNG streams derived from each run seed.
inline constexpr std::uint64_t kProblemStream = 0;
inline constexpr std::uint64_t kBuildStream = 1;
inline constexpr std::uint64_t kGuessStream = 2;
inline constexpr std::uint64_t kDatasetStream = 3;

struct SeedRun {
    std::uint64_t seed = 0;
    SolveReport report;
};

struct SeedStats {
    std::vector<SeedRun> runs;
    double mean_iterations = 0.0;
    double stddev_iterations = 0.0; ///< population standard deviation
    std::size_t converged = 0;

    bool all_converged() const { return converged == runs.size(); }
};

/// Problem draw for one seed.
fem::Problem problem_for_seed(fem::ProblemFactory& factory, std::uint64_t seed);

/// Solves the configured problem once per seed with the preconditioner
/// `expr_text`. Type errors are raised before any solve. Seeds run in
/// parallel; results are ordered like cfg.seeds.
SeedStats run_seeds(const RunConfig& cfg, const std::string& expr_text);

/// One row per seed, then "mean" and "stddev" rows.
std::string format_solve_csv(const RunConfig& cfg, const std::string& expr_text,
                             const SeedStats& stats);

struct EigenStudy {
    Vector eigenvalues;  ///< of A on the interior nodes, ascending
    DenseMatrix modes;   ///< matching orthonormal eigenvectors
    std::vector<std::string> labels;
    std::vector<Vector> amplification; ///< ||E v_j|| per preconditioner
    std::vector<Vector> rayleigh;      ///< <v_j, E v_j> per preconditioner
};

/// Dense error-propagation study on the first seed's problem; every
/// preconditioner must be linear.
EigenStudy run_eigen_study(const RunConfig& cfg);
std::string format_eigen_csv(const EigenStudy& s);

struct StudyRow {
    std::string key;   ///< schedule or coarse-space expression
    std::size_t size;  ///< levels or subdomains
    std::string expression;
    SeedStats stats;
};

std::vector<StudyRow> run_mg_study(const RunConfig& cfg);
std::string format_mg_csv(const std::vector<StudyRow>& rows);

/// Coarse entries are expressions without S; S is filled in per row
/// (tb_sparse) and the result is added to asm(S, overlap).
std::vector<StudyRow> run_asm_study(const RunConfig& cfg);
std::string format_asm_csv(const std::vector<StudyRow>& rows);

/// Sample j uses seed derive_seed(derive_seed(seed, kDatasetStream), j);
/// targets come from a banded direct solve. Throws std::runtime_error
/// naming the sample when a solve fails its residual check.
io::TensorPack generate_dataset(const fem::ProblemSpec& spec, std::size_t samples,
                                std::uint64_t seed);

struct VerifyResult {
    std::size_t checked = 0;
    double max_rel_residual = 0.0;
    std::size_t rhs_mismatches = 0;
    bool ok = false;
};

/// Rebuilds the first `max_samples` problems (all when zero) and checks
/// |A u - f| / |f| < tol for the stored targets.
VerifyResult verify_dataset(const io::TensorPack& pack, std::size_t max_samples, double tol = 1e-10);

/// The coarse basis of a tb_dense/tb_sparse expression as a TensorPack:
/// P (n x k), coords, dirichlet_mask and the selected trunk columns.
io::TensorPack dump_basis(const RunConfig& cfg, std::uint64_t seed);

/// row_ptr, col_idx, vals, rhs, coords, dirichlet_mask.
io::TensorPack problem_to_tensorpack(const fem::Problem& p);

} // namespace hyprec::cli
