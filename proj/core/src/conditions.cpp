#include "cfid/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <sstream>

#include "cfid/errors.hpp"

namespace cfid::ident {

using prob::CiQuery;
using prob::Var;
using scm::ModelA;
using scm::ModelB;

std::string to_string(const Condition& c) {
    switch (c.kind) {
        case CondKind::XY: return "X_|_Y";
        case CondKind::XYgivenZ: return "X_|_Y|Z";
        case CondKind::XYgivenZeq: return "X_|_Y|Z=" + std::to_string(c.index);
        case CondKind::YZ: return "Y_|_Z";
        case CondKind::YZgivenXeq: return "Y_|_Z|X=" + std::to_string(c.index);
        case CondKind::XZ: return "X_|_Z";
        case CondKind::XZgivenYeq: return "X_|_Z|Y=" + std::to_string(c.index);
    }
    return "?";
}

Condition parse_condition(const std::string& token) {
    auto fail = [&]() -> Condition {
        throw UnknownConditionError("unknown condition token '" + token +
                                    "' (grammar: X_|_Y, X_|_Y|Z, X_|_Y|Z=j, "
                                    "Y_|_Z, Y_|_Z|X=i, X_|_Z, X_|_Z|Y=k)");
    };

    const auto sep = token.find("_|_");
    if (sep == std::string::npos || sep != 1) return fail();
    const std::string pair = token.substr(0, sep + 4);  // "L_|_R"
    std::string rest = token.substr(sep + 4);

    bool is_xy = false, is_yz = false, is_xz = false;
    if (pair == "X_|_Y") is_xy = true;
    else if (pair == "Y_|_Z") is_yz = true;
    else if (pair == "X_|_Z") is_xz = true;
    else return fail();

    if (rest.empty()) {
        if (is_xy) return Condition::xy();
        if (is_yz) return Condition::yz();
        return Condition::xz();
    }
    if (rest[0] != '|') return fail();
    rest = rest.substr(1);

    const char want_var = is_xy ? 'Z' : (is_yz ? 'X' : 'Y');
    if (rest.empty() || rest[0] != want_var) return fail();
    if (rest.size() == 1) {
        if (is_xy) return Condition::xy_given_z();
        return fail();  // only X_|_Y has a whole-variable conditional form
    }
    if (rest[1] != '=') return fail();
    int value = -1;
    const char* begin = rest.data() + 2;
    const char* end = rest.data() + rest.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || value < 0) return fail();
    if (is_xy) return Condition::xy_given_z_eq(value);
    if (is_yz) return Condition::yz_given_x_eq(value);
    return Condition::xz_given_y_eq(value);
}

void check_condition_in_dims(const Condition& c, const Dims& d) {
    int limit = -1;
    switch (c.kind) {
        case CondKind::XYgivenZeq: limit = d.N; break;
        case CondKind::YZgivenXeq: limit = d.K; break;
        case CondKind::XZgivenYeq: limit = d.M; break;
        default: return;
    }
    if (c.index < 0 || c.index >= limit) {
        throw BadShapeError("condition " + to_string(c) + " out of range for dims " +
                            d.str());
    }
}

std::vector<Condition> condition_catalog(const Dims& d) {
    std::vector<Condition> out;
    out.push_back(Condition::xy());
    out.push_back(Condition::xy_given_z());
    for (int j = 0; j < d.N; ++j) out.push_back(Condition::xy_given_z_eq(j));
    out.push_back(Condition::yz());
    for (int i = 0; i < d.K; ++i) out.push_back(Condition::yz_given_x_eq(i));
    out.push_back(Condition::xz());
    for (int k = 0; k < d.M; ++k) out.push_back(Condition::xz_given_y_eq(k));
    return out;
}

namespace {

CiQuery to_query(const Condition& c) {
    switch (c.kind) {
        case CondKind::XY: return CiQuery::unconditional(Var::X, Var::Y);
        case CondKind::XYgivenZ: return CiQuery::given_whole(Var::X, Var::Y, Var::Z);
        case CondKind::XYgivenZeq:
            return CiQuery::given_event(Var::X, Var::Y, Var::Z, c.index);
        case CondKind::YZ: return CiQuery::unconditional(Var::Y, Var::Z);
        case CondKind::YZgivenXeq:
            return CiQuery::given_event(Var::Y, Var::Z, Var::X, c.index);
        case CondKind::XZ: return CiQuery::unconditional(Var::X, Var::Z);
        case CondKind::XZgivenYeq:
            return CiQuery::given_event(Var::X, Var::Z, Var::Y, c.index);
    }
    throw BadShapeError("unreachable condition kind");
}

double max_abs_pairwise_gap(const std::vector<double>& values) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            worst = std::max(worst, std::abs(values[i] - values[j]));
        }
    }
    return worst;
}

// max |m[i][z] m[i'][z'] - m[i][z'] m[i'][z]| over row/column pairs;
// the cross-product form of the printed ratio chains.
double max_rank1_minor(const std::vector<std::vector<double>>& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        for (std::size_t i2 = i + 1; i2 < m.size(); ++i2) {
            for (std::size_t z = 0; z + 1 < m[i].size(); ++z) {
                for (std::size_t z2 = z + 1; z2 < m[i].size(); ++z2) {
                    worst = std::max(
                        worst, std::abs(m[i][z] * m[i2][z2] - m[i][z2] * m[i2][z]));
                }
            }
        }
    }
    return worst;
}

// u^y component matrix over (x, z) of the counterfactual outcome table.
std::vector<std::vector<double>> cf_component(const scm::CondTable& u, const Dims& d,
                                              int y) {
    std::vector<std::vector<double>> m(static_cast<std::size_t>(d.K),
                                       std::vector<double>(static_cast<std::size_t>(d.N)));
    for (int x = 0; x < d.K; ++x) {
        for (int z = 0; z < d.N; ++z) {
            m[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] = u.at({x, z})[y];
        }
    }
    return m;
}

double literal_violation(const ModelA& m, const Condition& c) {
    const Dims d = m.dims();
    const auto& u = m.outcome_cf();
    const auto& a = m.x_dist();
    const auto& c_z = m.z_dist();
    const auto u1 = cf_component(u, d, 1);

    switch (c.kind) {
        case CondKind::XY: {
            // per-x mixtures of the Y=1 components must agree
            std::vector<double> mix(static_cast<std::size_t>(d.K), 0.0);
            for (int x = 0; x < d.K; ++x) {
                for (int z = 0; z < d.N; ++z) mix[static_cast<std::size_t>(x)] += c_z[z] * u1[x][z];
            }
            return max_abs_pairwise_gap(mix);
        }
        case CondKind::XYgivenZ: {
            double worst = 0.0;
            for (int j = 0; j < d.N; ++j) {
                worst = std::max(worst,
                                 literal_violation(m, Condition::xy_given_z_eq(j)));
            }
            return worst;
        }
        case CondKind::XYgivenZeq: {
            const int j = c.index;
            double worst = 0.0;
            for (int x = 1; x < d.K; ++x) {
                worst = std::max(worst, std::abs(u1[x][j] - u1[0][j]));
            }
            return worst;
        }
        case CondKind::YZ: {
            std::vector<double> mix(static_cast<std::size_t>(d.N), 0.0);
            for (int z = 0; z < d.N; ++z) {
                for (int x = 0; x < d.K; ++x) mix[static_cast<std::size_t>(z)] += a[x] * u1[x][z];
            }
            return max_abs_pairwise_gap(mix);
        }
        case CondKind::YZgivenXeq:
            return max_abs_pairwise_gap(u1[static_cast<std::size_t>(c.index)]);
        case CondKind::XZ:
            // X _|_ Z holds structurally under P0 in family A
            return 0.0;
        case CondKind::XZgivenYeq:
            return max_rank1_minor(cf_component(u, d, c.index));
    }
    throw BadShapeError("unreachable condition kind");
}

double literal_violation(const ModelB& m, const Condition& c) {
    const Dims d = m.dims();
    const auto& u = m.outcome_cf();
    const auto& a = m.x_dist();
    const auto& cz = m.z_given_x_cf();
    const auto u1 = cf_component(u, d, 1);

    switch (c.kind) {
        case CondKind::XY: {
            std::vector<double> mix(static_cast<std::size_t>(d.K), 0.0);
            for (int x = 0; x < d.K; ++x) {
                for (int z = 0; z < d.N; ++z) {
                    mix[static_cast<std::size_t>(x)] += cz.row(x)[z] * u1[x][z];
                }
            }
            return max_abs_pairwise_gap(mix);
        }
        case CondKind::XYgivenZ: {
            double worst = 0.0;
            for (int j = 0; j < d.N; ++j) {
                worst = std::max(worst,
                                 literal_violation(m, Condition::xy_given_z_eq(j)));
            }
            return worst;
        }
        case CondKind::XYgivenZeq: {
            const int j = c.index;
            double worst = 0.0;
            for (int x = 1; x < d.K; ++x) {
                worst = std::max(worst, std::abs(u1[x][j] - u1[0][j]));
            }
            return worst;
        }
        case CondKind::YZ: {
            // printed as a ratio chain; cross-product form over
            // numerator/denominator pairs per z
            std::vector<double> numer(static_cast<std::size_t>(d.N), 0.0);
            std::vector<double> denom(static_cast<std::size_t>(d.N), 0.0);
            for (int z = 0; z < d.N; ++z) {
                for (int x = 0; x < d.K; ++x) {
                    numer[static_cast<std::size_t>(z)] += a[x] * cz.row(x)[z] * u1[x][z];
                    denom[static_cast<std::size_t>(z)] += a[x] * cz.row(x)[z];
                }
            }
            double worst = 0.0;
            for (int z = 0; z + 1 < d.N; ++z) {
                for (int z2 = z + 1; z2 < d.N; ++z2) {
                    worst = std::max(worst, std::abs(numer[static_cast<std::size_t>(z)] *
                                                         denom[static_cast<std::size_t>(z2)] -
                                                     numer[static_cast<std::size_t>(z2)] *
                                                         denom[static_cast<std::size_t>(z)]));
                }
            }
            return worst;
        }
        case CondKind::YZgivenXeq:
            return max_abs_pairwise_gap(u1[static_cast<std::size_t>(c.index)]);
        case CondKind::XZ: {
            double worst = 0.0;
            for (int x = 1; x < d.K; ++x) {
                for (int z = 0; z < d.N; ++z) {
                    worst = std::max(worst, std::abs(cz.row(x)[z] - cz.row(0)[z]));
                }
            }
            return worst;
        }
        case CondKind::XZgivenYeq: {
            auto weighted = cf_component(u, d, c.index);
            for (int x = 0; x < d.K; ++x) {
                for (int z = 0; z < d.N; ++z) {
                    weighted[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] *=
                        cz.row(x)[z];
                }
            }
            return max_rank1_minor(weighted);
        }
    }
    throw BadShapeError("unreachable condition kind");
}

}  // namespace

CondResult condition_holds(const Model& m, const Condition& c, double tol,
                           CondMode mode) {
    check_condition_in_dims(c, scm::dims(m));
    if (mode == CondMode::generic_ci) {
        const auto joint = scm::intervention_joint(m);
        const auto r = prob::check_ci(joint, to_query(c), tol);
        return CondResult{r.independent, r.violation};
    }
    const double v = std::visit(
        [&](const auto& model) { return literal_violation(model, c); }, m);
    return CondResult{v <= tol, v};
}

}  // namespace cfid::ident
