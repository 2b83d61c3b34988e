#include "cfid/model.hpp"

#include <sstream>

namespace cfid::scm {

using prob::kDerivedCellFloor;
using prob::kProducedNormTol;

const char* family_name(Family f) { return f == Family::A ? "A" : "B"; }

namespace {

void check_dims(const Dims& d) {
    if (d.K < 2 || d.M < 2 || d.N < 2) {
        throw BadShapeError("model dims must all be >= 2, got " + d.str());
    }
}

void check_outcome_tables(const Dims& d, const CondTable& obs, const CondTable& cf) {
    const std::vector<int> want{d.K, d.N};
    if (obs.cond_dims() != want || obs.target_card() != d.M) {
        throw BadShapeError("outcome_obs table shape does not match dims " + d.str());
    }
    if (cf.cond_dims() != want || cf.target_card() != d.M) {
        throw BadShapeError("outcome_cf table shape does not match dims " + d.str());
    }
    for (int j = 0; j < d.N; ++j) {
        if (!(cf.at({0, j}) == obs.at({0, j}))) {
            std::ostringstream os;
            os << "outcome_cf row (0," << j
               << ") must equal outcome_obs row (0," << j << ") exactly";
            throw BadShapeError(os.str());
        }
    }
}

}  // namespace

ModelA::ModelA(Dims d, ProbVector a, ProbVector c, CondTable b, CondTable u)
    : dims_(d),
      x_dist_(std::move(a)),
      z_dist_(std::move(c)),
      outcome_obs_(std::move(b)),
      outcome_cf_(std::move(u)) {}

ModelA ModelA::validated(Dims dims, ProbVector x_dist, ProbVector z_dist,
                         CondTable outcome_obs, CondTable outcome_cf) {
    check_dims(dims);
    if (x_dist.size() != dims.K) throw BadShapeError("x_dist length != K");
    if (z_dist.size() != dims.N) throw BadShapeError("z_dist length != N");
    check_outcome_tables(dims, outcome_obs, outcome_cf);
    return ModelA(dims, std::move(x_dist), std::move(z_dist),
                  std::move(outcome_obs), std::move(outcome_cf));
}

ModelB::ModelB(Dims d, ProbVector a, CondTable dz, CondTable cz, CondTable b, CondTable u)
    : dims_(d),
      x_dist_(std::move(a)),
      z_obs_(std::move(dz)),
      z_cf_(std::move(cz)),
      outcome_obs_(std::move(b)),
      outcome_cf_(std::move(u)) {}

ModelB ModelB::validated(Dims dims, ProbVector x_dist, CondTable z_given_x_obs,
                         CondTable z_given_x_cf, CondTable outcome_obs,
                         CondTable outcome_cf) {
    check_dims(dims);
    if (x_dist.size() != dims.K) throw BadShapeError("x_dist length != K");
    const std::vector<int> want{dims.K};
    if (z_given_x_obs.cond_dims() != want || z_given_x_obs.target_card() != dims.N) {
        throw BadShapeError("z_given_x_obs table shape does not match dims");
    }
    if (z_given_x_cf.cond_dims() != want || z_given_x_cf.target_card() != dims.N) {
        throw BadShapeError("z_given_x_cf table shape does not match dims");
    }
    if (!(z_given_x_cf.row(0) == z_given_x_obs.row(0))) {
        throw BadShapeError("z_given_x_cf row 0 must equal z_given_x_obs row 0 exactly");
    }
    check_outcome_tables(dims, outcome_obs, outcome_cf);
    return ModelB(dims, std::move(x_dist), std::move(z_given_x_obs),
                  std::move(z_given_x_cf), std::move(outcome_obs), std::move(outcome_cf));
}

Family family(const Model& m) {
    return std::holds_alternative<ModelA>(m) ? Family::A : Family::B;
}

Dims dims(const Model& m) {
    return std::visit([](const auto& x) { return x.dims(); }, m);
}

ObservedSummary ObservedSummary::validated(Family family, Dims dims, ProbVector x_dist,
                                           ProbVector z0,
                                           std::vector<ProbVector> outcome_x0) {
    check_dims(dims);
    if (x_dist.size() != dims.K) throw InvalidSummaryError("summary x_dist length != K");
    if (z0.size() != dims.N) throw InvalidSummaryError("summary z0 length != N");
    if (static_cast<int>(outcome_x0.size()) != dims.N) {
        throw InvalidSummaryError("summary outcome_x0 must have one row per Z value");
    }
    for (const auto& row : outcome_x0) {
        if (row.size() != dims.M) {
            throw InvalidSummaryError("summary outcome_x0 row length != M");
        }
    }
    return ObservedSummary{family, dims, std::move(x_dist), std::move(z0),
                           std::move(outcome_x0)};
}

ObservedSummary observed_summary(const ModelA& m) {
    std::vector<ProbVector> rows;
    rows.reserve(static_cast<std::size_t>(m.dims().N));
    for (int j = 0; j < m.dims().N; ++j) rows.push_back(m.outcome_obs().at({0, j}));
    return ObservedSummary::validated(Family::A, m.dims(), m.x_dist(), m.z_dist(),
                                      std::move(rows));
}

ObservedSummary observed_summary(const ModelB& m) {
    std::vector<ProbVector> rows;
    rows.reserve(static_cast<std::size_t>(m.dims().N));
    for (int j = 0; j < m.dims().N; ++j) rows.push_back(m.outcome_obs().at({0, j}));
    return ObservedSummary::validated(Family::B, m.dims(), m.x_dist(),
                                      m.z_given_x_obs().row(0), std::move(rows));
}

ObservedSummary observed_summary(const Model& m) {
    return std::visit([](const auto& x) { return observed_summary(x); }, m);
}

namespace {

JointTable product_joint_a(const Dims& d, const ProbVector& a, const ProbVector& c,
                           const CondTable& outcome) {
    std::vector<double> cells(static_cast<std::size_t>(d.K) * d.M * d.N);
    for (int x = 0; x < d.K; ++x) {
        for (int z = 0; z < d.N; ++z) {
            const ProbVector& row = outcome.at({x, z});
            for (int y = 0; y < d.M; ++y) {
                cells[static_cast<std::size_t>((x * d.M + y) * d.N + z)] =
                    a[x] * c[z] * row[y];
            }
        }
    }
    return JointTable::validated_flat(std::move(cells), d, kDerivedCellFloor,
                                      kProducedNormTol);
}

JointTable product_joint_b(const Dims& d, const ProbVector& a, const CondTable& z_given_x,
                           const CondTable& outcome) {
    std::vector<double> cells(static_cast<std::size_t>(d.K) * d.M * d.N);
    for (int x = 0; x < d.K; ++x) {
        const ProbVector& zrow = z_given_x.row(x);
        for (int z = 0; z < d.N; ++z) {
            const ProbVector& row = outcome.at({x, z});
            for (int y = 0; y < d.M; ++y) {
                cells[static_cast<std::size_t>((x * d.M + y) * d.N + z)] =
                    a[x] * zrow[z] * row[y];
            }
        }
    }
    return JointTable::validated_flat(std::move(cells), d, kDerivedCellFloor,
                                      kProducedNormTol);
}

}  // namespace

JointTable observed_joint(const ModelA& m) {
    return product_joint_a(m.dims(), m.x_dist(), m.z_dist(), m.outcome_obs());
}

JointTable observed_joint(const ModelB& m) {
    return product_joint_b(m.dims(), m.x_dist(), m.z_given_x_obs(), m.outcome_obs());
}

JointTable observed_joint(const Model& m) {
    return std::visit([](const auto& x) { return observed_joint(x); }, m);
}

JointTable intervention_joint(const ModelA& m) {
    return product_joint_a(m.dims(), m.x_dist(), m.z_dist(), m.outcome_cf());
}

JointTable intervention_joint(const ModelB& m) {
    return product_joint_b(m.dims(), m.x_dist(), m.z_given_x_cf(), m.outcome_cf());
}

JointTable intervention_joint(const Model& m) {
    return std::visit([](const auto& x) { return intervention_joint(x); }, m);
}

double causal_effect_oracle(const ModelA& m, int y) {
    const Dims d = m.dims();
    if (y < 0 || y >= d.M) throw BadShapeError("causal_effect_oracle: y out of range");
    double total = 0.0;
    for (int z = 0; z < d.N; ++z) {
        double inner = 0.0;
        for (int x = 0; x < d.K; ++x) inner += m.x_dist()[x] * m.outcome_cf().at({x, z})[y];
        total += m.z_dist()[z] * inner;
    }
    return total;
}

double causal_effect_oracle(const ModelB& m, int y) {
    const Dims d = m.dims();
    if (y < 0 || y >= d.M) throw BadShapeError("causal_effect_oracle: y out of range");
    double total = 0.0;
    for (int x = 0; x < d.K; ++x) {
        double inner = 0.0;
        for (int z = 0; z < d.N; ++z) {
            inner += m.z_given_x_cf().row(x)[z] * m.outcome_cf().at({x, z})[y];
        }
        total += m.x_dist()[x] * inner;
    }
    return total;
}

double causal_effect_oracle(const Model& m, int y) {
    return std::visit([y](const auto& x) { return causal_effect_oracle(x, y); }, m);
}

}  // namespace cfid::scm
