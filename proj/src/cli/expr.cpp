#include "hyprec/cli/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "hyprec/krylov/report.hpp"
#include "hyprec/util/errors.hpp"

namespace hyprec::cli {

namespace {

// Greek spellings are accepted as aliases of the ASCII keys.
std::string canonical_key(const std::string& k) {
    if (k == "ν") return "nu";
    if (k == "γ") return "gamma";
    return k;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing text");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("preconditioner expression: " + what + " at position " +
                          std::to_string(pos_) + " in '" + s_ + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    static bool word_char(char c) {
        const auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '_' || c == '.' || c == '-' || c == '+' || u >= 0x80;
    }

    std::string word() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && word_char(s_[pos_])) ++pos_;
        if (start == pos_) fail("expected a name or value");
        return s_.substr(start, pos_ - start);
    }

    std::string value() {
        skip_ws();
        if (pos_ < s_.size() && (s_[pos_] == '\'' || s_[pos_] == '"')) {
            const char q = s_[pos_++];
            const std::size_t end = s_.find(q, pos_);
            if (end == std::string::npos) fail("unterminated string");
            std::string v = s_.substr(pos_, end - pos_);
            pos_ = end + 1;
            return v;
        }
        return word();
    }

    Expr expr() {
        Expr e;
        std::string head = word();
        if (peek('*')) {
            ++pos_;
            try {
                std::size_t used = 0;
                e.weight = std::stod(head, &used);
                if (used != head.size()) throw std::invalid_argument(head);
            } catch (const std::exception&) {
                fail("weight '" + head + "' is not a number");
            }
            head = word();
        }
        e.name = head;
        if (!peek('(')) return e;
        ++pos_;
        if (peek(')')) {
            ++pos_;
            return e;
        }
        while (true) {
            const std::size_t save = pos_;
            const std::string w = word();
            if (peek('=')) {
                ++pos_;
                const std::string key = canonical_key(w);
                if (e.params.count(key)) fail("duplicate parameter '" + key + "'");
                e.params[key] = value();
            } else {
                pos_ = save;
                e.children.push_back(expr());
            }
            if (peek(',')) {
                ++pos_;
                continue;
            }
            expect(')');
            break;
        }
        return e;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

std::string quote_if_needed(const std::string& v) {
    const bool plain = !v.empty() && std::all_of(v.begin(), v.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '_' || c == '.' || c == '-' || c == '+';
    });
    return plain ? v : "'" + v + "'";
}

void check_params(const Expr& e, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : e.params)
        if (!allowed.count(k))
            throw ConfigError("'" + e.name + "' has no parameter '" + k + "'");
}

void check_leaf(const Expr& e) {
    if (!e.children.empty()) throw ConfigError("'" + e.name + "' takes no sub-expressions");
}

} // namespace

std::string Expr::str(const std::string& key, const std::string& fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double Expr::num(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("'" + name + "': parameter " + key + "='" + it->second + "' is not a number");
}

std::size_t Expr::count(const std::string& key, std::size_t fallback) const {
    const double v = num(key, static_cast<double>(fallback));
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ConfigError("'" + name + "': parameter " + key + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string Expr::to_string() const {
    std::string s;
    if (weight != 1.0) s += format_double(weight) + "*";
    s += name;
    if (params.empty() && children.empty()) return s;
    s += "(";
    bool first = true;
    for (const auto& c : children) {
        if (!first) s += ", ";
        s += c.to_string();
        first = false;
    }
    for (const auto& [k, v] : params) {
        if (!first) s += ", ";
        s += k + "=" + quote_if_needed(v);
        first = false;
    }
    return s + ")";
}

Expr parse_expr(const std::string& text) { return Parser(text).parse(); }

ExprType type_check(const Expr& e, bool operator_spd) {
    if (!std::isfinite(e.weight))
        throw ConfigError("'" + e.name + "': weight is not a number");
    const std::string& n = e.name;
    if (n == "mult" || n == "add") {
        check_params(e, {});
        if (e.children.empty()) throw ConfigError("'" + n + "' needs at least one part");
        ExprType t;
        for (const auto& c : e.children) {
            const ExprType ct = type_check(c, operator_spd);
            t.linear = t.linear && ct.linear;
            t.spd = t.spd && ct.spd && c.weight > 0.0;
        }
        if (n == "mult") {
            for (std::size_t i = 0; i < e.children.size(); ++i)
                if (!(e.children[i] == e.children[e.children.size() - 1 - i])) t.spd = false;
        }
        t.spd = t.spd && t.linear;
        return t;
    }
    check_leaf(e);
    if (n == "identity") {
        check_params(e, {});
        return {true, true};
    }
    if (n == "exact") {
        check_params(e, {});
        return {true, operator_spd};
    }
    if (n == "jacobi") {
        check_params(e, {"nu", "gamma"});
        if (e.count("nu", 1) < 1) throw ConfigError("jacobi: nu must be >= 1");
        const std::string g = e.str("gamma", "auto");
        const bool positive = g == "auto" ? true : e.num("gamma", 0.0) > 0.0;
        return {true, positive};
    }
    if (n == "asm") {
        check_params(e, {"S", "overlap"});
        if (e.count("S", 1) < 1) throw ConfigError("asm: S must be >= 1");
        e.count("overlap", 1);
        return {true, operator_spd};
    }
    if (n == "tb_dense" || n == "tb_sparse") {
        std::set<std::string> allowed{"k", "select", "eps"};
        if (n == "tb_sparse") allowed.insert({"S", "smooth"});
        check_params(e, allowed);
        if (e.count("k", 32) < 1) throw ConfigError(n + ": k must be >= 1");
        const std::string sel = e.str("select", "random");
        if (sel != "random" && sel != "leading")
            throw ConfigError(n + ": select must be 'random' or 'leading'");
        if (!(e.num("eps", 1e-8) > 0.0)) throw ConfigError(n + ": eps must be positive");
        if (n == "tb_sparse") {
            if (e.count("S", 1) < 1) throw ConfigError("tb_sparse: S must be >= 1");
            if (e.str("smooth", "none") != "none") e.num("smooth", 0.0);
        }
        return {true, operator_spd};
    }
    if (n == "mg") {
        check_params(e, {"schedule", "galerkin"});
        if (!e.has("schedule")) throw ConfigError("mg: schedule is required");
        const std::string g = e.str("galerkin", "false");
        if (g != "true" && g != "false") throw ConfigError("mg: galerkin must be true or false");
        return {true, operator_spd};
    }
    if (n == "dp") {
        check_params(e, {});
        return {false, false};
    }
    throw ConfigError("unknown preconditioner '" + n + "'");
}

} // namespace hyprec::cli
