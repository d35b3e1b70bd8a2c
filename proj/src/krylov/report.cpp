#include "hyprec/krylov/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace hyprec {

void StopCriteria::validate() const {
    if (!(abs_res > 0.0) || !(a_norm_increment > 0.0) || !(rel_res > 0.0))
        throw std::invalid_argument("StopCriteria: tolerances must be positive");
    if (max_iters == 0) throw std::invalid_argument("StopCriteria: max_iters must be >= 1");
}

std::string to_string(Termination t) {
    switch (t) {
    case Termination::AbsRes: return "abs_res";
    case Termination::ANormInc: return "a_norm_inc";
    case Termination::RelRes: return "rel_res";
    case Termination::MaxIters: return "max_iters";
    case Termination::Breakdown: return "breakdown";
    }
    return "unknown";
}

bool converged(Termination t) {
    return t == Termination::AbsRes || t == Termination::ANormInc || t == Termination::RelRes;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_header() { return "seed,problem,preconditioner,iterations,termination,final_rel_res"; }

std::string csv_row(std::uint64_t seed, const std::string& problem,
                    const std::string& preconditioner, const SolveReport& report) {
    return std::to_string(seed) + "," + csv_field(problem) + "," + csv_field(preconditioner) + "," +
           std::to_string(report.iterations) + "," + to_string(report.termination) + "," +
           format_double(report.final_relative_residual);
}

} // namespace hyprec
