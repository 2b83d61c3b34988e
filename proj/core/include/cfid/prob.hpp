#ifndef CFID_PROB_HPP
#define CFID_PROB_HPP

#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfid/errors.hpp"

namespace cfid::prob {

/// Fixed variable roles: X is the control, Y the outcome, Z the
/// instrument (family A) or mediator (family B). No generic n-variable
/// support.
enum class Var { X = 0, Y = 1, Z = 2 };

const char* var_name(Var v);

/// Cardinalities (K, M, N) of (X, Y, Z).
struct Dims {
    int K = 0;
    int M = 0;
    int N = 0;

    int card(Var v) const {
        switch (v) {
            case Var::X: return K;
            case Var::Y: return M;
            default: return N;
        }
    }
    bool operator==(const Dims&) const = default;
    std::string str() const;
};

/// Strict positivity floor applied to every probability entry.
inline constexpr double kDefaultMinProb = 1e-9;
/// Acceptance tolerance on sum-to-one for externally supplied tables.
inline constexpr double kInputNormTol = 1e-9;
/// Tables produced internally (joints, marginals, conditionals) must
/// renormalize to this much tighter tolerance.
inline constexpr double kProducedNormTol = 1e-12;
/// Default tolerance for conditional-independence checks on analytically
/// constructed tables.
inline constexpr double kDefaultCiTol = 1e-9;
/// Positivity floor for derived joint tables; cells of a product of
/// floored simplex vectors stay strictly positive but can fall far below
/// the per-vector floor.
inline constexpr double kDerivedCellFloor = 1e-300;

/// A point on a probability simplex. Immutable after validation.
class ProbVector {
public:
    static ProbVector validated(std::vector<double> entries,
                                double min_prob = kDefaultMinProb,
                                double norm_tol = kInputNormTol);

    const std::vector<double>& entries() const { return entries_; }
    double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(entries_.size()); }

    bool operator==(const ProbVector&) const = default;

private:
    explicit ProbVector(std::vector<double> e) : entries_(std::move(e)) {}
    std::vector<double> entries_;
};

/// Conditional probability table: one ProbVector over the target variable
/// per point of the full Cartesian product of the conditioning
/// cardinalities. Rows are stored row-major in conditioning order.
class CondTable {
public:
    static CondTable validated(std::vector<int> cond_dims, int target_card,
                               std::vector<ProbVector> rows);

    const std::vector<int>& cond_dims() const { return cond_dims_; }
    int target_card() const { return target_card_; }
    int row_count() const { return static_cast<int>(rows_.size()); }
    const std::vector<ProbVector>& rows() const { return rows_; }

    const ProbVector& row(int flat) const { return rows_[static_cast<std::size_t>(flat)]; }
    const ProbVector& at(std::initializer_list<int> idx) const;
    int flat_index(std::initializer_list<int> idx) const;

    bool operator==(const CondTable&) const = default;

private:
    CondTable(std::vector<int> cd, int tc, std::vector<ProbVector> rows)
        : cond_dims_(std::move(cd)), target_card_(tc), rows_(std::move(rows)) {}
    std::vector<int> cond_dims_;
    int target_card_;
    std::vector<ProbVector> rows_;
};

/// Full joint distribution over X x Y x Z with strict positivity.
/// Immutable after validation; normalization is re-checked, never
/// silently repaired.
class JointTable {
public:
    /// Validates a nested raw array (shape, positivity, normalization).
    static JointTable validated(const std::vector<std::vector<std::vector<double>>>& cells,
                                double min_prob = kDefaultMinProb,
                                double norm_tol = kInputNormTol);

    /// Validates an already-flattened cell array laid out as
    /// cells[(x*M + y)*N + z].
    static JointTable validated_flat(std::vector<double> cells, Dims dims,
                                     double min_prob = kDefaultMinProb,
                                     double norm_tol = kInputNormTol);

    Dims dims() const { return dims_; }
    double at(int x, int y, int z) const {
        return cells_[static_cast<std::size_t>((x * dims_.M + y) * dims_.N + z)];
    }
    const std::vector<double>& cells() const { return cells_; }
    double sum() const;

private:
    JointTable(std::vector<double> c, Dims d) : cells_(std::move(c)), dims_(d) {}
    std::vector<double> cells_;
    Dims dims_;
};

/// Explicit, opt-in renormalization of a raw cell array.
std::vector<double> normalized(std::vector<double> cells);

/// Marginal table over a subset of {X, Y, Z}, in canonical X < Y < Z
/// order.
struct MarginalTable {
    std::vector<Var> vars;
    std::vector<int> dims;
    std::vector<double> cells;

    double at(std::span<const int> idx) const;
    double sum() const;
};

MarginalTable marginal(const JointTable& joint, std::vector<Var> keep);

/// P(target | given), marginalizing out any variable not assigned in
/// `given`. Positivity of the joint guarantees a well-defined quotient.
ProbVector conditional(const JointTable& joint, Var target,
                       const std::vector<std::pair<Var, int>>& given);

/// One conditional-independence statement about a joint table.
struct CiQuery {
    enum class GivenKind { none, whole, event };

    Var left;
    Var right;
    GivenKind given_kind = GivenKind::none;
    Var given_var = Var::Z;   // meaningful for whole/event
    int given_value = -1;     // meaningful for event

    static CiQuery unconditional(Var l, Var r);
    static CiQuery given_whole(Var l, Var r, Var g);
    static CiQuery given_event(Var l, Var r, Var g, int value);
};

struct CiResult {
    bool independent = false;
    /// Maximum |2x2 cross-product minor| over the checked slices.
    double violation = 0.0;
};

/// Tests the query via 2x2 cross-product minors of the conditioned pair
/// matrix: independence holds iff every minor magnitude is <= tol.
/// Whole-variable conditioning requires every slice; event conditioning
/// only the named slice; unconditional queries use the two-variable
/// marginal.
CiResult check_ci(const JointTable& joint, const CiQuery& query,
                  double tol = kDefaultCiTol);

}  // namespace cfid::prob

#endif
