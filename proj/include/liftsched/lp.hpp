#pragma once

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "liftsched/errors.hpp"
#include "liftsched/rational.hpp"

namespace liftsched {

enum class Rel { le, eq, ge };

struct LinRow {
    std::vector<std::pair<int, Rational>> terms;  // (variable index, coefficient)
    Rel rel = Rel::le;
    Rational rhs = 0;
    std::string name;
};

// Feasibility program over variables with implicit bounds 0 <= x <= 1.
// There is no objective; solving means deciding emptiness exactly.
struct LinearProgram {
    std::vector<std::string> vars;
    std::vector<LinRow> rows;

    int add_var(const std::string& name) {
        vars.push_back(name);
        return static_cast<int>(vars.size()) - 1;
    }
    void add_row(LinRow row) {
        for (const auto& [v, c] : row.terms)
            if (v < 0 || v >= static_cast<int>(vars.size()))
                throw InvalidInstance("row references undeclared variable");
        rows.push_back(std::move(row));
    }
};

// CPLEX-style LP text export with objective "min 0", for cross-checking with
// external solvers. Import is not supported.
inline std::string export_lp_text(const LinearProgram& lp) {
    std::ostringstream os;
    os << "\\ liftsched feasibility export\n";
    os << "Minimize\n obj:";
    if (!lp.vars.empty()) os << " 0 " << lp.vars[0];
    os << "\nSubject To\n";
    int unnamed = 0;
    for (const auto& row : lp.rows) {
        std::string name = row.name.empty() ? ("c" + std::to_string(unnamed++)) : row.name;
        os << " " << name << ":";
        if (row.terms.empty()) os << " 0 " << (lp.vars.empty() ? "x" : lp.vars[0]);
        bool first = true;
        for (const auto& [v, c] : row.terms) {
            if (c >= 0 && !first) os << " +";
            else if (c < 0) os << " -";
            else os << " ";
            Rational a = c < 0 ? Rational(-c) : c;
            os << to_string(a) << " " << lp.vars[static_cast<std::size_t>(v)];
            first = false;
        }
        os << (row.rel == Rel::le ? " <= " : row.rel == Rel::eq ? " = " : " >= ");
        os << to_string(row.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : lp.vars) os << " 0 <= " << v << " <= 1\n";
    os << "End\n";
    return os.str();
}

}  // namespace liftsched
