#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fsmid {

using Clause = std::vector<int>; // nonzero signed literals

// CNF with variables 1..n_vars.
struct CnfFormula {
    int n_vars = 0;
    std::vector<Clause> clauses;

    void validate() const {
        if (n_vars < 0) throw input_error("negative variable count");
        for (const auto& cl : clauses) {
            if (cl.empty()) throw input_error("empty clause at construction");
            for (int lit : cl) {
                int v = lit < 0 ? -lit : lit;
                if (lit == 0 || v > n_vars)
                    throw input_error("literal " + std::to_string(lit) + " out of range");
            }
        }
    }

    bool operator==(const CnfFormula&) const = default;
};

// Total truth assignment over [1, n_vars]; values[v-1] is the value of v.
struct Assignment {
    std::vector<bool> values;

    bool value(int var) const { return values[static_cast<size_t>(var - 1)]; }
};

inline bool satisfies(const Assignment& a, const CnfFormula& phi) {
    for (const auto& cl : phi.clauses) {
        bool sat = false;
        for (int lit : cl)
            if (a.value(lit < 0 ? -lit : lit) == (lit > 0)) {
                sat = true;
                break;
            }
        if (!sat) return false;
    }
    return true;
}

namespace detail {

// 0 = unassigned, 1 = true, -1 = false.
inline bool dpll(const CnfFormula& phi, std::vector<int>& vals) {
    // Unit propagation to fixpoint.
    std::vector<std::pair<int, int>> trail; // (var, previous value) for undo
    for (;;) {
        bool changed = false;
        for (const auto& cl : phi.clauses) {
            int unassigned = 0;
            int unit_lit = 0;
            bool sat = false;
            for (int lit : cl) {
                int v = lit < 0 ? -lit : lit;
                int val = vals[static_cast<size_t>(v - 1)];
                if (val == 0) {
                    ++unassigned;
                    unit_lit = lit;
                } else if ((val > 0) == (lit > 0)) {
                    sat = true;
                    break;
                }
            }
            if (sat) continue;
            if (unassigned == 0) {
                for (auto& [var, prev] : trail) vals[static_cast<size_t>(var - 1)] = prev;
                return false; // conflict
            }
            if (unassigned == 1) {
                int v = unit_lit < 0 ? -unit_lit : unit_lit;
                trail.emplace_back(v, 0);
                vals[static_cast<size_t>(v - 1)] = unit_lit > 0 ? 1 : -1;
                changed = true;
            }
        }
        if (!changed) break;
    }
    // Branch on the lowest-index unassigned variable, true first.
    int branch = 0;
    for (int v = 1; v <= phi.n_vars; ++v)
        if (vals[static_cast<size_t>(v - 1)] == 0) {
            branch = v;
            break;
        }
    if (branch == 0) return true; // everything assigned, no conflict
    for (int val : {1, -1}) {
        vals[static_cast<size_t>(branch - 1)] = val;
        if (dpll(phi, vals)) return true;
    }
    vals[static_cast<size_t>(branch - 1)] = 0;
    for (auto& [var, prev] : trail) vals[static_cast<size_t>(var - 1)] = prev;
    return false;
}

} // namespace detail

// Plain DPLL with unit propagation. Deterministic: branching picks the
// lowest-index unassigned variable and tries true first, so identical input
// yields an identical model. Unassigned variables default to true. Every
// SAT answer is re-checked with satisfies() before it is returned.
inline std::optional<Assignment> solve(const CnfFormula& phi) {
    phi.validate();
    std::vector<int> vals(static_cast<size_t>(phi.n_vars), 0);
    if (!detail::dpll(phi, vals)) return std::nullopt;
    Assignment a;
    a.values.resize(static_cast<size_t>(phi.n_vars));
    for (int v = 1; v <= phi.n_vars; ++v)
        a.values[static_cast<size_t>(v - 1)] = vals[static_cast<size_t>(v - 1)] >= 0;
    if (!satisfies(a, phi))
        throw std::logic_error("solver returned a non-model; this is a bug");
    return a;
}

// ---------------------------------------------------------------------------
// DIMACS CNF interchange.
// ---------------------------------------------------------------------------

inline CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_header = false;
    int declared_clauses = 0;
    CnfFormula phi;
    Clause current;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            if (have_header) throw format_error("duplicate header", line_no);
            std::istringstream hdr(line);
            std::string p, cnf;
            if (!(hdr >> p >> cnf >> phi.n_vars >> declared_clauses) || cnf != "cnf" ||
                phi.n_vars < 0 || declared_clauses < 0)
                throw format_error("malformed `p cnf <vars> <clauses>` header", line_no);
            have_header = true;
            continue;
        }
        if (!have_header) throw format_error("clause before header", line_no);
        std::istringstream body(line);
        int lit;
        while (body >> lit) {
            if (lit == 0) {
                if (current.empty()) throw format_error("empty clause", line_no);
                phi.clauses.push_back(std::move(current));
                current.clear();
            } else {
                int v = lit < 0 ? -lit : lit;
                if (v > phi.n_vars)
                    throw format_error("literal " + std::to_string(lit) +
                                       " exceeds declared variable count", line_no);
                current.push_back(lit);
            }
        }
        if (!body.eof()) throw format_error("non-integer token in clause", line_no);
    }
    if (!have_header) throw format_error("missing `p cnf` header");
    if (!current.empty()) throw format_error("unterminated clause (missing 0)", line_no);
    if (static_cast<int>(phi.clauses.size()) != declared_clauses)
        throw format_error("clause count mismatch: header says " +
                           std::to_string(declared_clauses) + ", found " +
                           std::to_string(phi.clauses.size()));
    return phi;
}

// Canonical emission: header, clauses in stored order, single spaces,
// trailing 0, one clause per line.
inline std::string emit_dimacs(const CnfFormula& phi) {
    std::ostringstream out;
    out << "p cnf " << phi.n_vars << ' ' << phi.clauses.size() << '\n';
    for (const auto& cl : phi.clauses) {
        for (int lit : cl) out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

// Model interchange, minisat-style: one line of space-separated signed
// literals, 0-terminated.
inline std::string emit_model(const Assignment& a) {
    std::ostringstream out;
    for (int v = 1; v <= static_cast<int>(a.values.size()); ++v)
        out << (a.value(v) ? v : -v) << ' ';
    out << "0\n";
    return out.str();
}

inline Assignment parse_model(const std::string& text, int n_vars) {
    std::istringstream in(text);
    Assignment a;
    a.values.assign(static_cast<size_t>(n_vars), false);
    std::vector<bool> seen(static_cast<size_t>(n_vars), false);
    int lit;
    while (in >> lit) {
        if (lit == 0) break;
        int v = lit < 0 ? -lit : lit;
        if (v > n_vars)
            throw format_error("model literal " + std::to_string(lit) + " out of range");
        a.values[static_cast<size_t>(v - 1)] = lit > 0;
        seen[static_cast<size_t>(v - 1)] = true;
    }
    for (int v = 1; v <= n_vars; ++v)
        if (!seen[static_cast<size_t>(v - 1)])
            throw format_error("model does not assign variable " + std::to_string(v));
    return a;
}

} // namespace fsmid
