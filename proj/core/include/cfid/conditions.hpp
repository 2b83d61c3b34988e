#ifndef CFID_CONDITIONS_HPP
#define CFID_CONDITIONS_HPP

#include <compare>
#include <set>
#include <string>
#include <vector>

#include "cfid/model.hpp"
#include "cfid/prob.hpp"

namespace cfid::ident {

using prob::Dims;
using scm::Family;
using scm::Model;

/// One independence statement about the intervention distribution P0.
/// Event kinds carry the conditioning value; the others carry none.
enum class CondKind {
    XY,              // X _|_ Y
    XYgivenZ,        // X _|_ Y | Z
    XYgivenZeq,      // X _|_ Y | Z = j
    YZ,              // Y _|_ Z
    YZgivenXeq,      // Y _|_ Z | X = i
    XZ,              // X _|_ Z
    XZgivenYeq,      // X _|_ Z | Y = k
};

struct Condition {
    CondKind kind;
    int index = -1;  // meaningful for *eq kinds only

    auto operator<=>(const Condition&) const = default;

    static Condition xy() { return {CondKind::XY, -1}; }
    static Condition xy_given_z() { return {CondKind::XYgivenZ, -1}; }
    static Condition xy_given_z_eq(int j) { return {CondKind::XYgivenZeq, j}; }
    static Condition yz() { return {CondKind::YZ, -1}; }
    static Condition yz_given_x_eq(int i) { return {CondKind::YZgivenXeq, i}; }
    static Condition xz() { return {CondKind::XZ, -1}; }
    static Condition xz_given_y_eq(int k) { return {CondKind::XZgivenYeq, k}; }
};

using AssumptionSet = std::set<Condition>;

/// Shell-safe condition grammar: X_|_Y, X_|_Y|Z, X_|_Y|Z=j, Y_|_Z,
/// Y_|_Z|X=i, X_|_Z, X_|_Z|Y=k.
std::string to_string(const Condition& c);

/// Parses the grammar above; throws UnknownConditionError naming the bad
/// token.
Condition parse_condition(const std::string& token);

/// Throws when an event index lies outside the dims.
void check_condition_in_dims(const Condition& c, const Dims& d);

/// Every condition statable for the given dims, in catalog order:
/// X_|_Y; X_|_Y|Z; X_|_Y|Z=j (j<N); Y_|_Z; Y_|_Z|X=i (i<K); X_|_Z;
/// X_|_Z|Y=k (k<M).
std::vector<Condition> condition_catalog(const Dims& d);

/// How a condition is evaluated against a model.
///   generic_ci   — run the minor-based CI check on the full intervention
///                  joint (every outcome component).
///   paper_literal — evaluate the printed parameter identities: the
///                  mixture/equality statements in their Y=1 components
///                  and the ratio chains as cross-products.
enum class CondMode { generic_ci, paper_literal };

struct CondResult {
    bool holds = false;
    double violation = 0.0;
};

CondResult condition_holds(const Model& m, const Condition& c,
                           double tol = prob::kDefaultCiTol,
                           CondMode mode = CondMode::generic_ci);

}  // namespace cfid::ident

#endif
