#ifndef CFID_BRANCHES_HPP
#define CFID_BRANCHES_HPP

#include <optional>
#include <string>
#include <vector>

#include "cfid/conditions.hpp"
#include "cfid/model.hpp"

namespace cfid::ident {

using scm::ObservedSummary;

/// Closed-form value a branch assigns to P0(Y=1), over summary fields
/// only.
enum class FormulaId {
    mixture,   // sum_j z0[j] * b0[j][1]
    row_at,    // b0[i][1]
    row_zero,  // b0[0][1]
    blend,     // a0 * mixture + (1 - a0) * b0[i][1]
};

/// One row of an identification theorem's value table, instantiated at a
/// concrete event index where the printed row ranges over one.
struct Branch {
    std::string id;          // e.g. "A3[i=1]"
    Family family;
    AssumptionSet required;
    FormulaId formula;
    int event_index;         // -1 when the formula has none
    std::string formula_text;
    std::string citation;    // theorem + row provenance
    /// Printed rows whose formula fails oracle verification stay callable
    /// but are flagged here and in every result that matches them.
    bool quarantined;
};

double branch_value(const Branch& branch, const ObservedSummary& summary);

/// The branch catalog for a family at given dims, in printed order.
/// Event-indexed rows expand over the actual cardinalities, and the
/// "all x >= 1" rows expand over the actual K.
std::vector<Branch> branch_table(Family family, prob::Dims dims);

struct IdentificationResult {
    std::optional<std::string> branch_id;
    std::optional<double> value;
    std::string provenance;
    bool quarantined = false;

    bool matched() const { return branch_id.has_value(); }
};

/// Scans the branch table in printed order and returns the first branch
/// whose required assumption set is covered by `assumptions`; a
/// whole-variable requirement is also covered by the conjunction of all
/// its event forms and vice versa. No match is a definite "not covered
/// by the catalog's sufficient conditions", not a non-identifiability
/// verdict.
IdentificationResult identify(const ObservedSummary& summary,
                              const AssumptionSet& assumptions);

}  // namespace cfid::ident

#endif
