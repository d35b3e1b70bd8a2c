#pragma once

#include <map>
#include <string>
#include <vector>

namespace hyprec::cli {

/// Parsed preconditioner expression.
///
///   expr   := [number '*'] name ['(' [item (',' item)*] ')']
///   item   := key '=' value | expr
///   value  := number | word | 'quoted' | "quoted"
///
/// e.g. mult(jacobi(nu=3), tb_dense(k=32), jacobi(nu=3)) or
/// add(asm(S=16, overlap=1), tb_sparse(k=8, S=16, smooth=0.6667)).
struct Expr {
    std::string name;
    double weight = 1.0;
    std::map<std::string, std::string> params;
    std::vector<Expr> children;

    /// Canonical text form; parse(e.to_string()) == e.
    std::string to_string() const;
    bool operator==(const Expr&) const = default;

    bool has(const std::string& key) const { return params.count(key) != 0; }
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key, double fallback) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
};

/// Throws ConfigError with the failing position.
Expr parse_expr(const std::string& text);

struct ExprType {
    bool linear = true;
    bool spd = true;
};

/// Flags the built preconditioner will carry, derived without building
/// anything. `operator_spd` states whether the system matrix is SPD.
/// Throws ConfigError for unknown names, bad parameters or arities.
ExprType type_check(const Expr& e, bool operator_spd);

} // namespace hyprec::cli
