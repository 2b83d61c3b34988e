#include "cfid/branches.hpp"

#include <algorithm>
#include <sstream>

namespace cfid::ident {

using prob::Dims;

double branch_value(const Branch& branch, const ObservedSummary& summary) {
    auto mixture = [&]() {
        double total = 0.0;
        for (int j = 0; j < summary.dims.N; ++j) {
            total += summary.z0[j] * summary.outcome_x0[static_cast<std::size_t>(j)][1];
        }
        return total;
    };
    switch (branch.formula) {
        case FormulaId::mixture: return mixture();
        case FormulaId::row_at:
            return summary.outcome_x0[static_cast<std::size_t>(branch.event_index)][1];
        case FormulaId::row_zero: return summary.outcome_x0[0][1];
        case FormulaId::blend: {
            const double a0 = summary.x_dist[0];
            return a0 * mixture() +
                   (1.0 - a0) *
                       summary.outcome_x0[static_cast<std::size_t>(branch.event_index)][1];
        }
    }
    throw BadShapeError("unreachable formula id");
}

namespace {

// Theorem naming per family and dims; the generic engine carries the
// closest printed theorem for other dims.
std::string theorem_name(Family f, const Dims& d) {
    struct Entry {
        Dims dims;
        const char* a;
        const char* b;
    };
    static const Entry table[] = {
        {{3, 3, 3}, "Theorem 5", "Theorem 8"},
        {{3, 2, 3}, "Theorem 6", "Theorem 9"},
        {{2, 2, 3}, "Theorem 7", "Theorem 10"},
        {{2, 2, 2}, "Theorem 2", "Theorem 3"},
    };
    for (const auto& e : table) {
        if (e.dims == d) return f == Family::A ? e.a : e.b;
    }
    return std::string(f == Family::A ? "Theorem 5" : "Theorem 8") +
           " (dimension-generic at " + d.str() + ")";
}

AssumptionSet rows_above_zero(const Dims& d) {
    AssumptionSet s;
    for (int x = 1; x < d.K; ++x) s.insert(Condition::yz_given_x_eq(x));
    return s;
}

std::string blend_text(int i) {
    std::ostringstream os;
    os << "a0 * sum_j z0[j]*b0[j][1] + (1 - a0) * b0[" << i << "][1]";
    return os.str();
}

}  // namespace

std::vector<Branch> branch_table(Family family, Dims dims) {
    if (dims.K < 2 || dims.M < 2 || dims.N < 2) {
        throw BadShapeError("branch_table: every dimension must be >= 2");
    }
    const std::string thm = theorem_name(family, dims);
    const bool binary_a = family == Family::A && dims == Dims{2, 2, 2};
    const bool binary_b = family == Family::B && dims == Dims{2, 2, 2};
    std::vector<Branch> out;

    auto add = [&](std::string id, AssumptionSet req, FormulaId f, int idx,
                   std::string text, std::string row, bool quarantined = false) {
        out.push_back(Branch{std::move(id), family, std::move(req), f, idx,
                             std::move(text), thm + ", " + row, quarantined});
    };

    if (family == Family::A) {
        add("A1", {Condition::xy()}, FormulaId::mixture, -1, "sum_j z0[j]*b0[j][1]",
            binary_a ? "case (a)" : "row 1 (X_|_Y)");
        add("A2", {Condition::xy_given_z()}, FormulaId::mixture, -1,
            "sum_j z0[j]*b0[j][1]", binary_a ? "case (b)" : "row 2 (X_|_Y|Z)");
        for (int i = 0; i < dims.N; ++i) {
            add("A3[i=" + std::to_string(i) + "]",
                {Condition::yz(), Condition::xy_given_z_eq(i)}, FormulaId::row_at, i,
                "b0[" + std::to_string(i) + "][1]",
                "row 3 (Y_|_Z & X_|_Y|Z=" + std::to_string(i) + ")");
        }
        add("A4", {Condition::yz_given_x_eq(1), Condition::xy_given_z()},
            FormulaId::row_zero, -1, "b0[0][1]", "row 4 (Y_|_Z|X=1 & X_|_Y|Z)");
        for (int i = 0; i < dims.N; ++i) {
            // printed form; fails oracle adjudication, kept under quarantine
            add("A5[i=" + std::to_string(i) + "]",
                {Condition::xz_given_y_eq(1), Condition::xy_given_z_eq(i)},
                FormulaId::row_at, i, "b0[" + std::to_string(i) + "][1]",
                "row 5 (X_|_Z|Y=1 & X_|_Y|Z=" + std::to_string(i) + ")",
                /*quarantined=*/true);
        }
        for (int i = 0; i < dims.N; ++i) {
            AssumptionSet req = rows_above_zero(dims);
            req.insert(Condition::xy_given_z_eq(i));
            const std::string row =
                binary_a ? (i == 0 ? "case (c)" : "case (d)")
                         : "row 6 (Y_|_Z|X=x, x>=1 & X_|_Y|Z=" + std::to_string(i) + ")";
            add("A6[i=" + std::to_string(i) + "]", std::move(req), FormulaId::blend, i,
                blend_text(i), row);
        }
        return out;
    }

    add("B1", {Condition::xy()}, FormulaId::mixture, -1, "sum_j z0[j]*b0[j][1]",
        binary_b ? "case (a)" : "row 1 (X_|_Y)");
    for (int x = 0; x < dims.K; ++x) {
        add("B2[x=" + std::to_string(x) + "]",
            {Condition::xy_given_z(), Condition::yz_given_x_eq(x)}, FormulaId::row_zero,
            -1, "b0[0][1]", "row 2 (X_|_Y|Z & Y_|_Z|X=" + std::to_string(x) + ")");
    }
    for (int i = 0; i < dims.N; ++i) {
        AssumptionSet req = rows_above_zero(dims);
        req.insert(Condition::xy_given_z_eq(i));
        const std::string row =
            binary_b ? (i == 0 ? "case (b)" : "case (c)")
                     : "row 3 (Y_|_Z|X=x, x>=1 & X_|_Y|Z=" + std::to_string(i) + ")";
        add("B3[i=" + std::to_string(i) + "]", std::move(req), FormulaId::blend, i,
            blend_text(i), row);
    }
    return out;
}

namespace {

bool covers(const AssumptionSet& assumptions, const Condition& required, const Dims& d) {
    if (assumptions.count(required)) return true;
    if (required.kind == CondKind::XYgivenZ) {
        for (int j = 0; j < d.N; ++j) {
            if (!assumptions.count(Condition::xy_given_z_eq(j))) return false;
        }
        return true;
    }
    if (required.kind == CondKind::XYgivenZeq) {
        return assumptions.count(Condition::xy_given_z()) > 0;
    }
    return false;
}

}  // namespace

IdentificationResult identify(const ObservedSummary& summary,
                              const AssumptionSet& assumptions) {
    // re-run the shape checks; component simplexes are valid by
    // construction of ProbVector
    ObservedSummary::validated(summary.family, summary.dims, summary.x_dist, summary.z0,
                               summary.outcome_x0);
    for (const auto& c : assumptions) check_condition_in_dims(c, summary.dims);

    for (const auto& branch : branch_table(summary.family, summary.dims)) {
        const bool matched =
            std::all_of(branch.required.begin(), branch.required.end(),
                        [&](const Condition& req) {
                            return covers(assumptions, req, summary.dims);
                        });
        if (!matched) continue;
        IdentificationResult result;
        result.branch_id = branch.id;
        result.value = branch_value(branch, summary);
        result.provenance = branch.citation;
        result.quarantined = branch.quarantined;
        if (branch.quarantined) {
            result.provenance += " [QUARANTINED: printed formula fails oracle verification]";
        }
        return result;
    }
    IdentificationResult result;
    result.provenance = "no matching sufficient condition";
    return result;
}

}  // namespace cfid::ident
