#pragma once

#include <string>
#include <vector>

#include <cubeamalg/core.hpp>

namespace cubeamalg {

enum class Severity { structural, axiom };

/// One violation found by a validator, with a concrete witness where the
/// checked condition has one (elements, faces, or a face pair).
struct Violation {
    std::string code;  // "B3", "A1", "identity", "functoriality", "disjointness", ...
    Severity severity = Severity::axiom;
    std::string message;
    std::vector<ElementId> elements;
    std::vector<Face> faces;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> notes;

    bool ok() const { return violations.empty(); }

    bool has_structural() const {
        for (const auto& v : violations)
            if (v.severity == Severity::structural) return true;
        return false;
    }

    void add(Violation v) { violations.push_back(std::move(v)); }

    void merge(const ValidationReport& other) {
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
        notes.insert(notes.end(), other.notes.begin(), other.notes.end());
    }

    std::string summary() const {
        if (ok()) return "valid";
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += v.code + ": " + v.message;
        }
        return s;
    }
};

}  // namespace cubeamalg
