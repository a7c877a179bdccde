#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <cubeamalg/core.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg {

/// The conjunction characterizing embeddings of a finite structure: all pairwise
/// inequalities, one relation atom per tuple, the stored function atoms, and
/// (for labeled structures) positive/negative label atoms below the universe.
/// Variables are positions in the source's sorted element list.
struct ThetaFormula {
    struct Neq {
        std::uint32_t lhs, rhs;
        friend bool operator==(const Neq&, const Neq&) = default;
    };
    struct Rel {
        std::vector<std::uint32_t> tuple;  // variable indices
        std::uint32_t rel_index;
        friend bool operator==(const Rel&, const Rel&) = default;
    };
    struct Fn {
        std::vector<std::uint32_t> tuple;
        std::uint32_t fn_index;
        std::uint32_t value;  // variable index
        friend bool operator==(const Fn&, const Fn&) = default;
    };
    struct Label {
        std::uint32_t var;
        std::uint32_t label_index;
        bool positive;
        friend bool operator==(const Label&, const Label&) = default;
    };

    std::uint32_t arity = 1;
    std::uint32_t variables = 0;
    std::vector<Neq> inequalities;
    std::vector<Rel> relations;
    std::vector<Fn> functions;
    std::vector<Label> label_atoms;

    friend bool operator==(const ThetaFormula&, const ThetaFormula&) = default;
};

inline ThetaFormula theta(const Structure& s) {
    ThetaFormula f;
    f.arity = s.arity;
    f.variables = static_cast<std::uint32_t>(s.elements.size());
    for (std::uint32_t i = 0; i < f.variables; ++i)
        for (std::uint32_t j = i + 1; j < f.variables; ++j) f.inequalities.push_back({i, j});
    if (!s.elements.empty()) {
        std::vector<std::uint32_t> pos(s.arity, 0);
        for (;;) {
            const TupleEntry& e = s.entry(pos);
            f.relations.push_back({pos, e.rel_index});
            for (std::uint32_t i = 0; i <= e.rel_index; ++i) {
                auto vi = s.index_of(e.fn_values[i]);
                f.functions.push_back({pos, i, *vi});
            }
            if (!next_tuple(pos, s.elements.size())) break;
        }
    }
    if (s.labeled()) {
        for (std::uint32_t v = 0; v < f.variables; ++v)
            for (std::uint32_t j = 0; j < s.label_universe; ++j)
                f.label_atoms.push_back({v, j, (s.labels[v] >> j & 1) != 0});
    }
    return f;
}

/// Evaluate the formula in the target under a total assignment of element ids to
/// the variables. Assignments hitting ids outside the target are input errors.
inline bool satisfies_theta(const Structure& target, const ThetaFormula& f,
                            std::span<const ElementId> assignment) {
    if (assignment.size() != f.variables)
        throw input_error("assignment-arity", "assignment must cover every variable");
    if (f.arity != target.arity)
        throw input_error("assignment-arity", "formula arity differs from the target's");
    std::vector<std::uint32_t> idx(f.variables);
    for (std::uint32_t v = 0; v < f.variables; ++v) {
        auto i = target.index_of(assignment[v]);
        if (!i)
            throw input_error("dangling-id",
                              "assignment value " + std::to_string(assignment[v]) +
                                  " is not an element of the target");
        idx[v] = *i;
    }
    for (const auto& a : f.inequalities)
        if (assignment[a.lhs] == assignment[a.rhs]) return false;
    std::vector<std::uint32_t> t;
    for (const auto& a : f.relations) {
        t.clear();
        for (auto v : a.tuple) t.push_back(idx[v]);
        if (target.entry(t).rel_index != a.rel_index) return false;
    }
    for (const auto& a : f.functions) {
        t.clear();
        for (auto v : a.tuple) t.push_back(idx[v]);
        if (target.fn_value(t, a.fn_index) != assignment[a.value]) return false;
    }
    if (!f.label_atoms.empty() && !target.labeled())
        throw input_error("unlabeled-target", "formula carries label atoms but the target is unlabeled");
    for (const auto& a : f.label_atoms) {
        bool holds = (target.labels[idx[a.var]] >> a.label_index & 1) != 0;
        if (holds != a.positive) return false;
    }
    return true;
}

}  // namespace cubeamalg
