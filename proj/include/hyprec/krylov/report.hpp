#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "hyprec/linalg/dense.hpp"

namespace hyprec {

/// Termination protocol: stop as soon as |r| <= abs_res, or the A-norm of
/// the latest update is <= a_norm_increment, or |r|/|r0| <= rel_res.
struct StopCriteria {
    double abs_res = 1e-12;
    double a_norm_increment = 1e-12;
    double rel_res = 1e-9;
    std::size_t max_iters = 10000;
    /// The A-norm test is meaningless for indefinite operators; callers
    /// switch it off there.
    bool use_a_norm = true;

    void validate() const;
};

enum class Termination { AbsRes, ANormInc, RelRes, MaxIters, Breakdown };

std::string to_string(Termination t);
bool converged(Termination t);

struct SolveReport {
    std::size_t iterations = 0;
    Vector residual_history; ///< iterations + 1 entries, [0] = |r0|
    Termination termination = Termination::MaxIters;
    Vector solution;
    /// Explicit |f - A u| / |r0| of the returned solution.
    double final_relative_residual = 0.0;
};

/// Fixed-precision rendering used by every CSV writer (17 significant digits).
std::string format_double(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// "seed,problem,preconditioner,iterations,termination,final_rel_res"
std::string csv_header();
std::string csv_row(std::uint64_t seed, const std::string& problem,
                    const std::string& preconditioner, const SolveReport& report);

} // namespace hyprec
