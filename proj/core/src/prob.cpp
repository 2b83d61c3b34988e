#include "cfid/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cfid::prob {

const char* var_name(Var v) {
    switch (v) {
        case Var::X: return "X";
        case Var::Y: return "Y";
        default: return "Z";
    }
}

std::string Dims::str() const {
    std::ostringstream os;
    os << K << "x" << M << "x" << N;
    return os.str();
}

namespace {

double exact_sum(const std::vector<double>& v) {
    // Kahan summation; keeps the produced-table 1e-12 budget independent
    // of table size.
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void check_simplex(const std::vector<double>& entries, double min_prob,
                   double norm_tol, const char* what) {
    if (entries.size() < 2) {
        throw BadShapeError(std::string(what) + ": needs at least 2 entries");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i] >= min_prob)) {
            std::ostringstream os;
            os << what << ": entry " << i << " = " << entries[i]
               << " below positivity floor " << min_prob;
            throw NonPositiveCellError(os.str());
        }
        if (!(entries[i] < 1.0)) {
            std::ostringstream os;
            os << what << ": entry " << i << " = " << entries[i] << " not < 1";
            throw NonPositiveCellError(os.str());
        }
    }
    const double sum = exact_sum(entries);
    if (std::abs(sum - 1.0) > norm_tol) {
        std::ostringstream os;
        os << what << ": entries sum to " << sum << ", deviates from 1 by "
           << std::abs(sum - 1.0) << " (tolerance " << norm_tol << ")";
        throw NotNormalizedError(os.str());
    }
}

}  // namespace

ProbVector ProbVector::validated(std::vector<double> entries, double min_prob,
                                 double norm_tol) {
    check_simplex(entries, min_prob, norm_tol, "ProbVector");
    return ProbVector(std::move(entries));
}

CondTable CondTable::validated(std::vector<int> cond_dims, int target_card,
                               std::vector<ProbVector> rows) {
    if (cond_dims.empty()) throw BadShapeError("CondTable: no conditioning variables");
    long expected = 1;
    for (int d : cond_dims) {
        if (d < 2) throw BadShapeError("CondTable: conditioning cardinality < 2");
        expected *= d;
    }
    if (static_cast<long>(rows.size()) != expected) {
        throw BadShapeError("CondTable: row count does not cover the conditioning product");
    }
    for (const auto& r : rows) {
        if (r.size() != target_card) {
            throw BadShapeError("CondTable: row length differs from target cardinality");
        }
    }
    return CondTable(std::move(cond_dims), target_card, std::move(rows));
}

int CondTable::flat_index(std::initializer_list<int> idx) const {
    int flat = 0;
    auto dim_it = cond_dims_.begin();
    for (int i : idx) {
        flat = flat * *dim_it + i;
        ++dim_it;
    }
    return flat;
}

const ProbVector& CondTable::at(std::initializer_list<int> idx) const {
    return rows_[static_cast<std::size_t>(flat_index(idx))];
}

JointTable JointTable::validated(
    const std::vector<std::vector<std::vector<double>>>& cells, double min_prob,
    double norm_tol) {
    if (cells.size() < 2) throw BadShapeError("JointTable: |X| < 2");
    const std::size_t m = cells[0].size();
    if (m < 2) throw BadShapeError("JointTable: |Y| < 2");
    const std::size_t n = cells[0][0].size();
    if (n < 2) throw BadShapeError("JointTable: |Z| < 2");

    std::vector<double> flat;
    flat.reserve(cells.size() * m * n);
    for (const auto& plane : cells) {
        if (plane.size() != m) throw BadShapeError("JointTable: ragged Y dimension");
        for (const auto& row : plane) {
            if (row.size() != n) throw BadShapeError("JointTable: ragged Z dimension");
            flat.insert(flat.end(), row.begin(), row.end());
        }
    }
    const Dims dims{static_cast<int>(cells.size()), static_cast<int>(m),
                    static_cast<int>(n)};
    return validated_flat(std::move(flat), dims, min_prob, norm_tol);
}

JointTable JointTable::validated_flat(std::vector<double> cells, Dims dims,
                                      double min_prob, double norm_tol) {
    if (dims.K < 2 || dims.M < 2 || dims.N < 2) {
        throw BadShapeError("JointTable: every dimension must be >= 2");
    }
    if (cells.size() != static_cast<std::size_t>(dims.K) * dims.M * dims.N) {
        throw BadShapeError("JointTable: cell count does not match dims " + dims.str());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!(cells[i] >= min_prob)) {
            std::ostringstream os;
            os << "JointTable: cell " << i << " = " << cells[i]
               << " below positivity floor " << min_prob;
            throw NonPositiveCellError(os.str());
        }
    }
    const double sum = exact_sum(cells);
    if (std::abs(sum - 1.0) > norm_tol) {
        std::ostringstream os;
        os << "JointTable: cells sum to " << sum << ", deviates by "
           << std::abs(sum - 1.0) << " (tolerance " << norm_tol << ")";
        throw NotNormalizedError(os.str());
    }
    return JointTable(std::move(cells), dims);
}

double JointTable::sum() const { return exact_sum(cells_); }

std::vector<double> normalized(std::vector<double> cells) {
    const double sum = exact_sum(cells);
    if (!(sum > 0.0)) throw NonPositiveCellError("normalized: total mass not positive");
    for (auto& c : cells) c /= sum;
    return cells;
}

MarginalTable marginal(const JointTable& joint, std::vector<Var> keep) {
    if (keep.empty()) throw BadShapeError("marginal: keep set is empty");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

    const Dims d = joint.dims();
    MarginalTable out;
    out.vars = keep;
    std::size_t total = 1;
    for (Var v : keep) {
        out.dims.push_back(d.card(v));
        total *= static_cast<std::size_t>(d.card(v));
    }
    out.cells.assign(total, 0.0);

    for (int x = 0; x < d.K; ++x) {
        for (int y = 0; y < d.M; ++y) {
            for (int z = 0; z < d.N; ++z) {
                const int full[3] = {x, y, z};
                std::size_t flat = 0;
                for (std::size_t i = 0; i < keep.size(); ++i) {
                    flat = flat * static_cast<std::size_t>(out.dims[i]) +
                           static_cast<std::size_t>(full[static_cast<int>(keep[i])]);
                }
                out.cells[flat] += joint.at(x, y, z);
            }
        }
    }
    return out;
}

double MarginalTable::at(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        flat = flat * static_cast<std::size_t>(dims[i]) + static_cast<std::size_t>(idx[i]);
    }
    return cells[flat];
}

double MarginalTable::sum() const { return exact_sum(cells); }

ProbVector conditional(const JointTable& joint, Var target,
                       const std::vector<std::pair<Var, int>>& given) {
    const Dims d = joint.dims();
    int assigned[3] = {-1, -1, -1};
    for (const auto& [v, value] : given) {
        if (v == target) throw BadShapeError("conditional: target appears in given");
        if (value < 0 || value >= d.card(v)) {
            throw BadShapeError("conditional: given value out of range");
        }
        assigned[static_cast<int>(v)] = value;
    }

    std::vector<double> numer(static_cast<std::size_t>(d.card(target)), 0.0);
    for (int x = 0; x < d.K; ++x) {
        if (assigned[0] >= 0 && x != assigned[0]) continue;
        for (int y = 0; y < d.M; ++y) {
            if (assigned[1] >= 0 && y != assigned[1]) continue;
            for (int z = 0; z < d.N; ++z) {
                if (assigned[2] >= 0 && z != assigned[2]) continue;
                const int t = (target == Var::X) ? x : (target == Var::Y) ? y : z;
                numer[static_cast<std::size_t>(t)] += joint.at(x, y, z);
            }
        }
    }
    const double mass = exact_sum(numer);
    for (auto& c : numer) c /= mass;
    return ProbVector::validated(std::move(numer), kDerivedCellFloor, kProducedNormTol);
}

CiQuery CiQuery::unconditional(Var l, Var r) {
    if (l == r) throw BadShapeError("CiQuery: left == right");
    return CiQuery{l, r, GivenKind::none, Var::Z, -1};
}

CiQuery CiQuery::given_whole(Var l, Var r, Var g) {
    if (l == r || g == l || g == r) throw BadShapeError("CiQuery: variables must differ");
    return CiQuery{l, r, GivenKind::whole, g, -1};
}

CiQuery CiQuery::given_event(Var l, Var r, Var g, int value) {
    if (l == r || g == l || g == r) throw BadShapeError("CiQuery: variables must differ");
    return CiQuery{l, r, GivenKind::event, g, value};
}

namespace {

// max |P(a,b|s) P(a',b'|s) - P(a,b'|s) P(a',b|s)| over a<a', b<b'.
double max_minor(const std::vector<std::vector<double>>& m) {
    const std::size_t rows = m.size();
    const std::size_t cols = m[0].size();
    double worst = 0.0;
    for (std::size_t a = 0; a + 1 < rows; ++a) {
        for (std::size_t a2 = a + 1; a2 < rows; ++a2) {
            for (std::size_t b = 0; b + 1 < cols; ++b) {
                for (std::size_t b2 = b + 1; b2 < cols; ++b2) {
                    const double minor =
                        m[a][b] * m[a2][b2] - m[a][b2] * m[a2][b];
                    worst = std::max(worst, std::abs(minor));
                }
            }
        }
    }
    return worst;
}

// Conditioned pair matrix P(left=a, right=b | given = s); pass s = -1 for
// the unconditional two-variable marginal.
std::vector<std::vector<double>> pair_matrix(const JointTable& joint, Var left,
                                             Var right, Var given, int s) {
    const Dims d = joint.dims();
    std::vector<std::vector<double>> m(
        static_cast<std::size_t>(d.card(left)),
        std::vector<double>(static_cast<std::size_t>(d.card(right)), 0.0));
    double mass = 0.0;
    for (int x = 0; x < d.K; ++x) {
        for (int y = 0; y < d.M; ++y) {
            for (int z = 0; z < d.N; ++z) {
                const int full[3] = {x, y, z};
                if (s >= 0 && full[static_cast<int>(given)] != s) continue;
                const double p = joint.at(x, y, z);
                m[static_cast<std::size_t>(full[static_cast<int>(left)])]
                 [static_cast<std::size_t>(full[static_cast<int>(right)])] += p;
                mass += p;
            }
        }
    }
    for (auto& row : m) {
        for (auto& c : row) c /= mass;
    }
    return m;
}

}  // namespace

CiResult check_ci(const JointTable& joint, const CiQuery& query, double tol) {
    const Dims d = joint.dims();
    if (query.given_kind == CiQuery::GivenKind::event) {
        if (query.given_value < 0 || query.given_value >= d.card(query.given_var)) {
            throw BadShapeError("check_ci: event value out of range");
        }
    }

    double worst = 0.0;
    switch (query.given_kind) {
        case CiQuery::GivenKind::none:
            worst = max_minor(pair_matrix(joint, query.left, query.right, Var::Z, -1));
            break;
        case CiQuery::GivenKind::event:
            worst = max_minor(pair_matrix(joint, query.left, query.right,
                                          query.given_var, query.given_value));
            break;
        case CiQuery::GivenKind::whole:
            for (int s = 0; s < d.card(query.given_var); ++s) {
                worst = std::max(
                    worst, max_minor(pair_matrix(joint, query.left, query.right,
                                                 query.given_var, s)));
            }
            break;
    }
    return CiResult{worst <= tol, worst};
}

}  // namespace cfid::prob
