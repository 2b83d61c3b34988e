#include "cfid/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "cfid/rng.hpp"

namespace cfid::scm {

using ident::AssumptionSet;
using ident::CondKind;
using ident::Condition;
using prob::Dims;

namespace {

using Row = std::vector<double>;
using RowBlock = std::vector<Row>;  // rows indexed by z

// Normalized view of a constraint set, in terms of what each condition
// pins in the counterfactual parameterization.
struct Plan {
    bool mix_xy = false;           // X_|_Y: per-x mixtures equal
    bool mix_yz = false;           // Y_|_Z: per-z mixtures equal
    bool xz = false;               // X_|_Z (family B: equal mediator rows)
    bool whole_pin = false;        // X_|_Y|Z
    std::set<int> pins;            // z values with X_|_Y|Z=j
    std::set<int> rc;              // i >= 1 with Y_|_Z|X=i (constant rows)
    bool b0_const = false;         // Y_|_Z|X=0 (constant observed X=0 block)
    std::optional<int> rank1_k;    // X_|_Z|Y=k
};

[[noreturn]] void unsupported(const AssumptionSet& set, const char* why) {
    std::ostringstream os;
    os << "constraint set {";
    bool first = true;
    for (const auto& c : set) {
        if (!first) os << ", ";
        os << to_string(c);
        first = false;
    }
    os << "} cannot be realized by the constrained constructors: " << why;
    throw UnsatisfiableConstraintSetError(os.str());
}

Plan make_plan(Family family, const Dims& d, const AssumptionSet& set) {
    Plan p;
    for (const auto& c : set) {
        ident::check_condition_in_dims(c, d);
        switch (c.kind) {
            case CondKind::XY: p.mix_xy = true; break;
            case CondKind::XYgivenZ: p.whole_pin = true; break;
            case CondKind::XYgivenZeq: p.pins.insert(c.index); break;
            case CondKind::YZ: p.mix_yz = true; break;
            case CondKind::YZgivenXeq:
                if (c.index == 0) p.b0_const = true;
                else p.rc.insert(c.index);
                break;
            case CondKind::XZ: p.xz = true; break;
            case CondKind::XZgivenYeq:
                if (p.rank1_k) unsupported(set, "at most one X_|_Z|Y=k condition");
                p.rank1_k = c.index;
                break;
        }
    }
    if (p.whole_pin) {
        for (int j = 0; j < d.N; ++j) p.pins.insert(j);
    }
    if (static_cast<int>(p.pins.size()) == d.N) p.whole_pin = true;

    if (p.mix_xy && p.mix_yz) {
        unsupported(set, "X_|_Y and Y_|_Z mixtures cannot be built jointly");
    }
    if (p.rank1_k && (p.mix_xy || p.mix_yz)) {
        unsupported(set, "a rank-one slice cannot be combined with a mixture condition");
    }
    if (p.rank1_k && (!p.rc.empty() || p.b0_const)) {
        unsupported(set, "a rank-one slice cannot be combined with Y_|_Z|X=i rows");
    }
    if (p.mix_xy && !p.pins.empty() && !p.rc.empty()) {
        unsupported(set, "X_|_Y with both pinned columns and constant rows");
    }
    if (family == Family::B) {
        if (p.mix_xy && !p.pins.empty()) {
            unsupported(set, "family B X_|_Y with pinned columns");
        }
        if (p.mix_yz && (!p.pins.empty() || !p.rc.empty() || p.b0_const ||
                         p.mix_xy || p.rank1_k)) {
            unsupported(set, "family B Y_|_Z only builds on its own (with X_|_Z)");
        }
        if (p.rank1_k && !p.xz && !p.whole_pin && p.pins.size() > 1) {
            unsupported(set, "family B rank-one slice with several pinned columns "
                             "requires X_|_Z");
        }
    }
    return p;
}

Row sampled_row(Rng& rng, int n, double floor) { return rng.simplex(n, floor); }

// Largest scale in [0,1] keeping base + scale*delta >= floor.
double feasible_scale(const Row& base, const Row& delta, double floor) {
    double scale = 1.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (delta[i] < 0.0) {
            scale = std::min(scale, (base[i] - floor) / (-delta[i]));
        }
    }
    return std::max(0.0, scale);
}

Row blend(const Row& target, const Row& noise, const Row& noise_mean, double scale) {
    Row out(target.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = target[i] + scale * (noise[i] - noise_mean[i]);
    }
    return out;
}

constexpr double kUFloor = 1e-4;       // floor for constructed counterfactual rows
constexpr double kUFloorSlack = 5e-5;  // floor after noise corrections

struct Floors {
    double row;  // outcome rows
    double z;    // Z distributions / mediator rows
    double a;    // X distribution
};

Floors floors_for(const Dims& d) {
    return Floors{std::min(0.05, 0.5 / d.M), std::min(0.05, 0.5 / d.N),
                  std::min(0.05, 0.5 / d.K)};
}

// Caps entry 0 of a simplex vector, shifting excess mass onto the rest
// proportionally.
void cap_first_entry(Row& v, double cap) {
    if (v[0] <= cap) return;
    const double excess = v[0] - cap;
    const double rest = 1.0 - v[0];
    v[0] = cap;
    for (std::size_t i = 1; i < v.size(); ++i) v[i] += excess * (v[i] / rest);
}

// Fills components y != k of a row whose k component is fixed.
Row fill_around_component(Rng& rng, int m, int k, double value, double floor) {
    Row out(static_cast<std::size_t>(m));
    out[static_cast<std::size_t>(k)] = value;
    const double residual = 1.0 - value;
    if (m == 2) {
        out[static_cast<std::size_t>(1 - k)] = residual;
        return out;
    }
    const Row split = rng.simplex(m - 1, floor);
    int pos = 0;
    for (int y = 0; y < m; ++y) {
        if (y == k) continue;
        out[static_cast<std::size_t>(y)] = residual * split[static_cast<std::size_t>(pos++)];
    }
    return out;
}

prob::ProbVector to_pv(Row v) { return prob::ProbVector::validated(std::move(v)); }

prob::CondTable outcome_table(const Dims& d, const std::vector<RowBlock>& rows) {
    std::vector<prob::ProbVector> flat;
    flat.reserve(static_cast<std::size_t>(d.K) * d.N);
    for (int x = 0; x < d.K; ++x) {
        for (int z = 0; z < d.N; ++z) {
            flat.push_back(to_pv(rows[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)]));
        }
    }
    return prob::CondTable::validated({d.K, d.N}, d.M, std::move(flat));
}

prob::CondTable mediator_table(const Dims& d, const RowBlock& rows) {
    std::vector<prob::ProbVector> flat;
    flat.reserve(static_cast<std::size_t>(d.K));
    for (int x = 0; x < d.K; ++x) flat.push_back(to_pv(rows[static_cast<std::size_t>(x)]));
    return prob::CondTable::validated({d.K}, d.N, std::move(flat));
}

// Observed X=0 outcome block. `common` carries the row shared by pinned
// columns (or by all columns) when the plan forces one.
RowBlock build_b0(Rng& rng, const Dims& d, const Plan& p, const Floors& fl,
                  const std::optional<Row>& common, double blend_mu) {
    RowBlock b0(static_cast<std::size_t>(d.N));
    const bool all_common =
        p.b0_const || (p.whole_pin && (!p.rc.empty() || p.mix_yz));
    const bool pin_common = !p.pins.empty() && (p.mix_yz || (!p.rc.empty() && p.pins.size() > 1));
    for (int z = 0; z < d.N; ++z) {
        const bool pinned = p.pins.count(z) > 0;
        if (all_common || (pin_common && pinned)) {
            b0[static_cast<std::size_t>(z)] = *common;
        } else if (p.mix_yz) {
            // stay close enough to the target row that the per-column
            // residuals remain decomposable
            const Row r = sampled_row(rng, d.M, fl.row);
            Row mixed(static_cast<std::size_t>(d.M));
            for (int y = 0; y < d.M; ++y) {
                mixed[static_cast<std::size_t>(y)] =
                    (1.0 - blend_mu) * (*common)[static_cast<std::size_t>(y)] +
                    blend_mu * r[static_cast<std::size_t>(y)];
            }
            b0[static_cast<std::size_t>(z)] = mixed;
        } else {
            b0[static_cast<std::size_t>(z)] = sampled_row(rng, d.M, fl.row);
        }
    }
    return b0;
}

// ---------------------------------------------------------------- family A

ModelA sample_a(const Dims& d, const Plan& p, const AssumptionSet& set, Rng& rng) {
    const Floors fl = floors_for(d);

    Row a = rng.simplex(d.K, fl.a);
    if (p.mix_yz) cap_first_entry(a, 0.5);
    const Row c = rng.simplex(d.N, fl.z);

    double a_rc = 0.0;
    for (int i : p.rc) a_rc += a[static_cast<std::size_t>(i)];
    const double a_free = 1.0 - a[0] - a_rc;
    const bool no_free_rows = p.rc.size() == static_cast<std::size_t>(d.K - 1);

    std::optional<Row> common;
    if (p.b0_const || p.mix_yz || (!p.pins.empty() && !p.rc.empty() && p.pins.size() > 1) ||
        (p.whole_pin && !p.rc.empty())) {
        common = sampled_row(rng, d.M, fl.row);
    }

    double blend_mu = 0.0;
    if (p.mix_yz && !no_free_rows) {
        blend_mu = std::min(0.5, 0.9 * a_free * (fl.row - kUFloor) /
                                     (a[0] * (1.0 - fl.row)));
    }

    Plan bp = p;
    if (p.mix_yz && no_free_rows) bp.b0_const = true;  // forced constant block
    const RowBlock b0 = build_b0(rng, d, bp, fl, common, blend_mu);

    // observed rows at X>=1 are unconstrained
    std::vector<RowBlock> b(static_cast<std::size_t>(d.K));
    b[0] = b0;
    for (int x = 1; x < d.K; ++x) {
        b[static_cast<std::size_t>(x)].resize(static_cast<std::size_t>(d.N));
        for (int z = 0; z < d.N; ++z) {
            b[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] =
                sampled_row(rng, d.M, fl.row);
        }
    }

    std::vector<RowBlock> u(static_cast<std::size_t>(d.K),
                            RowBlock(static_cast<std::size_t>(d.N)));
    u[0] = b0;

    if (p.mix_xy) {
        Row target(static_cast<std::size_t>(d.M), 0.0);
        for (int z = 0; z < d.N; ++z) {
            for (int y = 0; y < d.M; ++y) {
                target[static_cast<std::size_t>(y)] +=
                    c[static_cast<std::size_t>(z)] * b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)];
            }
        }
        std::vector<int> free_cols;
        for (int z = 0; z < d.N; ++z) {
            if (!p.pins.count(z)) free_cols.push_back(z);
        }
        double c_free = 0.0;
        for (int z : free_cols) c_free += c[static_cast<std::size_t>(z)];
        Row target_free(static_cast<std::size_t>(d.M), 0.0);
        if (!free_cols.empty()) {
            for (int z : free_cols) {
                for (int y = 0; y < d.M; ++y) {
                    target_free[static_cast<std::size_t>(y)] +=
                        (c[static_cast<std::size_t>(z)] / c_free) *
                        b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)];
                }
            }
        }
        for (int i = 1; i < d.K; ++i) {
            auto& row_block = u[static_cast<std::size_t>(i)];
            if (p.rc.count(i)) {
                for (int z = 0; z < d.N; ++z) row_block[static_cast<std::size_t>(z)] = target;
                continue;
            }
            for (int j : p.pins) row_block[static_cast<std::size_t>(j)] = b0[static_cast<std::size_t>(j)];
            if (free_cols.empty()) continue;
            RowBlock noise(static_cast<std::size_t>(d.N));
            Row mean(static_cast<std::size_t>(d.M), 0.0);
            for (int z : free_cols) {
                noise[static_cast<std::size_t>(z)] = sampled_row(rng, d.M, fl.row);
                for (int y = 0; y < d.M; ++y) {
                    mean[static_cast<std::size_t>(y)] +=
                        (c[static_cast<std::size_t>(z)] / c_free) *
                        noise[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)];
                }
            }
            double scale = 1.0;
            for (int z : free_cols) {
                Row delta(static_cast<std::size_t>(d.M));
                for (int y = 0; y < d.M; ++y) {
                    delta[static_cast<std::size_t>(y)] =
                        noise[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)] -
                        mean[static_cast<std::size_t>(y)];
                }
                scale = std::min(scale, feasible_scale(target_free, delta, kUFloorSlack));
            }
            scale *= 0.9;
            for (int z : free_cols) {
                Row delta(static_cast<std::size_t>(d.M));
                for (int y = 0; y < d.M; ++y) {
                    delta[static_cast<std::size_t>(y)] =
                        noise[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)] -
                        mean[static_cast<std::size_t>(y)];
                }
                row_block[static_cast<std::size_t>(z)] =
                    blend(target_free, delta, Row(static_cast<std::size_t>(d.M), 0.0), scale);
            }
        }
    } else if (p.mix_yz) {
        const Row& s = *common;
        for (int i : p.rc) {
            for (int z = 0; z < d.N; ++z) {
                u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] = s;
            }
        }
        std::vector<int> free_rows;
        for (int i = 1; i < d.K; ++i) {
            if (!p.rc.count(i)) free_rows.push_back(i);
        }
        for (int z = 0; z < d.N; ++z) {
            if (free_rows.empty()) break;
            // per-column residual target
            Row t(static_cast<std::size_t>(d.M));
            for (int y = 0; y < d.M; ++y) {
                t[static_cast<std::size_t>(y)] =
                    (s[static_cast<std::size_t>(y)] * (1.0 - a_rc) -
                     a[0] * b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)]) /
                    a_free;
            }
            if (p.pins.count(z)) {
                for (int i : free_rows) {
                    u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] =
                        b0[static_cast<std::size_t>(z)];
                }
                continue;
            }
            std::vector<Row> noise;
            Row mean(static_cast<std::size_t>(d.M), 0.0);
            for (int i : free_rows) {
                noise.push_back(sampled_row(rng, d.M, fl.row));
                for (int y = 0; y < d.M; ++y) {
                    mean[static_cast<std::size_t>(y)] +=
                        (a[static_cast<std::size_t>(i)] / a_free) *
                        noise.back()[static_cast<std::size_t>(y)];
                }
            }
            double scale = 1.0;
            for (const auto& n : noise) {
                Row delta(static_cast<std::size_t>(d.M));
                for (int y = 0; y < d.M; ++y) {
                    delta[static_cast<std::size_t>(y)] =
                        n[static_cast<std::size_t>(y)] - mean[static_cast<std::size_t>(y)];
                }
                scale = std::min(scale, feasible_scale(t, delta, kUFloorSlack));
            }
            scale *= 0.9;
            for (std::size_t idx = 0; idx < free_rows.size(); ++idx) {
                u[static_cast<std::size_t>(free_rows[idx])][static_cast<std::size_t>(z)] =
                    blend(t, noise[idx], mean, scale);
            }
        }
    } else if (p.rank1_k) {
        const int k = *p.rank1_k;
        if (!p.pins.empty()) {
            // pinned column forces unit row factors
            for (int i = 1; i < d.K; ++i) {
                for (int z = 0; z < d.N; ++z) {
                    if (p.pins.count(z)) {
                        u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] =
                            b0[static_cast<std::size_t>(z)];
                    } else {
                        u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] =
                            fill_around_component(
                                rng, d.M, k,
                                b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(k)],
                                fl.row);
                    }
                }
            }
        } else {
            double max_bk = 0.0;
            for (int z = 0; z < d.N; ++z) {
                max_bk = std::max(max_bk,
                                  b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(k)]);
            }
            const double phi_hi = 0.8 / max_bk;
            for (int i = 1; i < d.K; ++i) {
                const double phi = rng.uniform(0.25 * phi_hi, phi_hi);
                for (int z = 0; z < d.N; ++z) {
                    u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] =
                        fill_around_component(
                            rng, d.M, k,
                            phi * b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(k)],
                            fl.row);
                }
            }
        }
    } else {
        for (int i = 1; i < d.K; ++i) {
            auto& row_block = u[static_cast<std::size_t>(i)];
            if (p.rc.count(i)) {
                const Row value = p.pins.empty()
                                      ? sampled_row(rng, d.M, fl.row)
                                      : b0[static_cast<std::size_t>(*p.pins.begin())];
                for (int z = 0; z < d.N; ++z) row_block[static_cast<std::size_t>(z)] = value;
                continue;
            }
            for (int z = 0; z < d.N; ++z) {
                row_block[static_cast<std::size_t>(z)] =
                    p.pins.count(z) ? b0[static_cast<std::size_t>(z)]
                                    : sampled_row(rng, d.M, fl.row);
            }
        }
    }
    (void)set;
    return ModelA::validated(d, to_pv(a), to_pv(c), outcome_table(d, b),
                             outcome_table(d, u));
}

// ---------------------------------------------------------------- family B

ModelB sample_b(const Dims& d, const Plan& p, const AssumptionSet& set, Rng& rng) {
    const Floors fl = floors_for(d);

    Row a = rng.simplex(d.K, fl.a);
    if (p.mix_yz) cap_first_entry(a, 0.5);

    RowBlock d_rows(static_cast<std::size_t>(d.K));
    for (int x = 0; x < d.K; ++x) d_rows[static_cast<std::size_t>(x)] = rng.simplex(d.N, fl.z);

    RowBlock c_rows(static_cast<std::size_t>(d.K));
    c_rows[0] = d_rows[0];
    const bool rank1_forces_shared_mediator = p.rank1_k && p.whole_pin;
    if (p.xz || rank1_forces_shared_mediator) {
        for (int x = 1; x < d.K; ++x) c_rows[static_cast<std::size_t>(x)] = d_rows[0];
    } else {
        for (int x = 1; x < d.K; ++x) c_rows[static_cast<std::size_t>(x)] = rng.simplex(d.N, fl.z);
    }

    std::optional<Row> common;
    if (p.b0_const || p.mix_yz ||
        (!p.pins.empty() && !p.rc.empty() && p.pins.size() > 1) ||
        (p.whole_pin && !p.rc.empty())) {
        common = sampled_row(rng, d.M, fl.row);
    }

    double blend_mu = 0.0;
    if (p.mix_yz) {
        blend_mu = 0.5;
        for (int z = 0; z < d.N; ++z) {
            double weight_free = 0.0;
            for (int i = 1; i < d.K; ++i) {
                weight_free += a[static_cast<std::size_t>(i)] *
                               c_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
            }
            const double pinned_mass = a[0] * d_rows[0][static_cast<std::size_t>(z)];
            blend_mu = std::min(blend_mu, 0.9 * weight_free * (fl.row - kUFloor) /
                                              (pinned_mass * (1.0 - fl.row)));
        }
    }

    const RowBlock b0 = build_b0(rng, d, p, fl, common, blend_mu);

    std::vector<RowBlock> b(static_cast<std::size_t>(d.K));
    b[0] = b0;
    for (int x = 1; x < d.K; ++x) {
        b[static_cast<std::size_t>(x)].resize(static_cast<std::size_t>(d.N));
        for (int z = 0; z < d.N; ++z) {
            b[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] =
                sampled_row(rng, d.M, fl.row);
        }
    }

    std::vector<RowBlock> u(static_cast<std::size_t>(d.K),
                            RowBlock(static_cast<std::size_t>(d.N)));
    u[0] = b0;

    if (p.mix_xy) {
        Row target(static_cast<std::size_t>(d.M), 0.0);
        for (int z = 0; z < d.N; ++z) {
            for (int y = 0; y < d.M; ++y) {
                target[static_cast<std::size_t>(y)] +=
                    c_rows[0][static_cast<std::size_t>(z)] *
                    b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)];
            }
        }
        for (int i = 1; i < d.K; ++i) {
            auto& row_block = u[static_cast<std::size_t>(i)];
            if (p.rc.count(i)) {
                for (int z = 0; z < d.N; ++z) row_block[static_cast<std::size_t>(z)] = target;
                continue;
            }
            const Row& w = c_rows[static_cast<std::size_t>(i)];
            RowBlock noise(static_cast<std::size_t>(d.N));
            Row mean(static_cast<std::size_t>(d.M), 0.0);
            for (int z = 0; z < d.N; ++z) {
                noise[static_cast<std::size_t>(z)] = sampled_row(rng, d.M, fl.row);
                for (int y = 0; y < d.M; ++y) {
                    mean[static_cast<std::size_t>(y)] +=
                        w[static_cast<std::size_t>(z)] *
                        noise[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)];
                }
            }
            double scale = 1.0;
            for (int z = 0; z < d.N; ++z) {
                Row delta(static_cast<std::size_t>(d.M));
                for (int y = 0; y < d.M; ++y) {
                    delta[static_cast<std::size_t>(y)] =
                        noise[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)] -
                        mean[static_cast<std::size_t>(y)];
                }
                scale = std::min(scale, feasible_scale(target, delta, kUFloorSlack));
            }
            scale *= 0.9;
            for (int z = 0; z < d.N; ++z) {
                row_block[static_cast<std::size_t>(z)] =
                    blend(target, noise[static_cast<std::size_t>(z)], mean, scale);
            }
        }
    } else if (p.mix_yz) {
        const Row& s = *common;
        for (int z = 0; z < d.N; ++z) {
            double a_free_z = 0.0;
            for (int i = 1; i < d.K; ++i) {
                a_free_z += a[static_cast<std::size_t>(i)] *
                            c_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
            }
            const double p0_z = a[0] * d_rows[0][static_cast<std::size_t>(z)] + a_free_z;
            Row t(static_cast<std::size_t>(d.M));
            for (int y = 0; y < d.M; ++y) {
                t[static_cast<std::size_t>(y)] =
                    (p0_z * s[static_cast<std::size_t>(y)] -
                     a[0] * d_rows[0][static_cast<std::size_t>(z)] *
                         b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)]) /
                    a_free_z;
            }
            std::vector<Row> noise;
            Row mean(static_cast<std::size_t>(d.M), 0.0);
            for (int i = 1; i < d.K; ++i) {
                noise.push_back(sampled_row(rng, d.M, fl.row));
                const double w = a[static_cast<std::size_t>(i)] *
                                 c_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] /
                                 a_free_z;
                for (int y = 0; y < d.M; ++y) {
                    mean[static_cast<std::size_t>(y)] += w * noise.back()[static_cast<std::size_t>(y)];
                }
            }
            double scale = 1.0;
            for (const auto& n : noise) {
                Row delta(static_cast<std::size_t>(d.M));
                for (int y = 0; y < d.M; ++y) {
                    delta[static_cast<std::size_t>(y)] =
                        n[static_cast<std::size_t>(y)] - mean[static_cast<std::size_t>(y)];
                }
                scale = std::min(scale, feasible_scale(t, delta, kUFloorSlack));
            }
            scale *= 0.9;
            for (int i = 1; i < d.K; ++i) {
                u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] =
                    blend(t, noise[static_cast<std::size_t>(i - 1)], mean, scale);
            }
        }
    } else if (p.rank1_k) {
        const int k = *p.rank1_k;
        const double cap = 1.0 - (d.M - 1) * 0.5 * fl.row;
        if (p.pins.size() == 1 && !p.xz) {
            // A pinned column forces the row factor c_ij / d_0j to 1.
            // Rebuild the free mediator rows with just enough mass at each
            // off-pin z that the induced outcome component stays under cap.
            const int j = *p.pins.begin();
            for (int i = 1; i < d.K; ++i) {
                Row row(static_cast<std::size_t>(d.N));
                row[static_cast<std::size_t>(j)] = d_rows[0][static_cast<std::size_t>(j)];
                double floor_mass = row[static_cast<std::size_t>(j)];
                for (int z = 0; z < d.N; ++z) {
                    if (z == j) continue;
                    row[static_cast<std::size_t>(z)] =
                        d_rows[0][static_cast<std::size_t>(z)] *
                        b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(k)] / cap;
                    floor_mass += row[static_cast<std::size_t>(z)];
                }
                const Row extra = rng.simplex(d.N - 1, 0.05);
                int pos = 0;
                for (int z = 0; z < d.N; ++z) {
                    if (z == j) continue;
                    row[static_cast<std::size_t>(z)] +=
                        (1.0 - floor_mass) * extra[static_cast<std::size_t>(pos++)];
                }
                c_rows[static_cast<std::size_t>(i)] = row;
            }
        }
        for (int i = 1; i < d.K; ++i) {
            double phi;
            if (!p.pins.empty()) {
                const int j = *p.pins.begin();
                phi = c_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /
                      d_rows[0][static_cast<std::size_t>(j)];
            } else {
                double hi = 1e9;
                for (int z = 0; z < d.N; ++z) {
                    const double weight =
                        d_rows[0][static_cast<std::size_t>(z)] *
                        b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(k)] /
                        c_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
                    hi = std::min(hi, 0.8 / weight);
                }
                phi = rng.uniform(0.25 * hi, hi);
            }
            for (int z = 0; z < d.N; ++z) {
                if (p.pins.count(z)) {
                    u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] =
                        b0[static_cast<std::size_t>(z)];
                    continue;
                }
                const double value =
                    phi * d_rows[0][static_cast<std::size_t>(z)] *
                    b0[static_cast<std::size_t>(z)][static_cast<std::size_t>(k)] /
                    c_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
                u[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] =
                    fill_around_component(rng, d.M, k, value, fl.row);
            }
        }
    } else {
        for (int i = 1; i < d.K; ++i) {
            auto& row_block = u[static_cast<std::size_t>(i)];
            if (p.rc.count(i)) {
                const Row value = p.pins.empty()
                                      ? sampled_row(rng, d.M, fl.row)
                                      : b0[static_cast<std::size_t>(*p.pins.begin())];
                for (int z = 0; z < d.N; ++z) row_block[static_cast<std::size_t>(z)] = value;
                continue;
            }
            for (int z = 0; z < d.N; ++z) {
                row_block[static_cast<std::size_t>(z)] =
                    p.pins.count(z) ? b0[static_cast<std::size_t>(z)]
                                    : sampled_row(rng, d.M, fl.row);
            }
        }
    }
    (void)set;
    return ModelB::validated(d, to_pv(a), mediator_table(d, d_rows),
                             mediator_table(d, c_rows), outcome_table(d, b),
                             outcome_table(d, u));
}

}  // namespace

Model sample_model(Family family, Dims dims, const AssumptionSet& constraints,
                   std::uint64_t seed) {
    if (dims.K < 2 || dims.M < 2 || dims.N < 2) {
        throw BadShapeError("sample_model: every dimension must be >= 2");
    }
    const Plan plan = make_plan(family, dims, constraints);
    Rng rng(Rng::mix(seed, family == Family::A ? 0xA : 0xB));
    if (family == Family::A) return sample_a(dims, plan, constraints, rng);
    return sample_b(dims, plan, constraints, rng);
}

namespace {

// Mean Y=1 mass sitting in the counterfactual slots when u = b.
double natural_cf_level(const Model& base) {
    if (const auto* ma = std::get_if<ModelA>(&base)) {
        const Dims d = ma->dims();
        const double a0 = ma->x_dist()[0];
        double level = 0.0;
        for (int i = 1; i < d.K; ++i) {
            for (int z = 0; z < d.N; ++z) {
                level += (ma->x_dist()[i] / (1.0 - a0)) * ma->z_dist()[z] *
                         ma->outcome_obs().at({i, z})[1];
            }
        }
        return level;
    }
    const auto& mb = std::get<ModelB>(base);
    const Dims d = mb.dims();
    const double a0 = mb.x_dist()[0];
    double level = 0.0;
    for (int i = 1; i < d.K; ++i) {
        for (int z = 0; z < d.N; ++z) {
            level += (mb.x_dist()[i] / (1.0 - a0)) * mb.z_given_x_obs().row(i)[z] *
                     mb.outcome_obs().at({i, z})[1];
        }
    }
    return level;
}

// Rebuilds the base with u = b (and, family B, c = d): the "no
// confounding" completion.
Model natural_completion(const Model& base) {
    if (const auto* ma = std::get_if<ModelA>(&base)) {
        return ModelA::validated(ma->dims(), ma->x_dist(), ma->z_dist(),
                                 ma->outcome_obs(), ma->outcome_obs());
    }
    const auto& mb = std::get<ModelB>(base);
    return ModelB::validated(mb.dims(), mb.x_dist(), mb.z_given_x_obs(),
                             mb.z_given_x_obs(), mb.outcome_obs(), mb.outcome_obs());
}

// Rebuilds the base with every counterfactual outcome row at X>=1 set to
// `level` in its Y=1 component.
Model extreme_completion(const Model& base, double level, Rng& rng) {
    const Dims d = scm::dims(base);
    std::vector<prob::ProbVector> rows;
    rows.reserve(static_cast<std::size_t>(d.K) * d.N);
    const auto& b = std::visit([](const auto& m) -> const prob::CondTable& {
        return m.outcome_obs();
    }, base);
    for (int x = 0; x < d.K; ++x) {
        for (int z = 0; z < d.N; ++z) {
            if (x == 0) {
                rows.push_back(b.at({0, z}));
            } else {
                rows.push_back(to_pv(fill_around_component(rng, d.M, 1, level,
                                                           std::min(0.05, 0.5 / d.M))));
            }
        }
    }
    auto u = prob::CondTable::validated({d.K, d.N}, d.M, std::move(rows));
    if (const auto* ma = std::get_if<ModelA>(&base)) {
        return ModelA::validated(d, ma->x_dist(), ma->z_dist(), ma->outcome_obs(),
                                 std::move(u));
    }
    const auto& mb = std::get<ModelB>(base);
    return ModelB::validated(d, mb.x_dist(), mb.z_given_x_obs(), mb.z_given_x_obs(),
                             mb.outcome_obs(), std::move(u));
}

double max_observed_gap(const Model& m1, const Model& m2) {
    const auto j1 = observed_joint(m1);
    const auto j2 = observed_joint(m2);
    double gap = 0.0;
    for (std::size_t i = 0; i < j1.cells().size(); ++i) {
        gap = std::max(gap, std::abs(j1.cells()[i] - j2.cells()[i]));
    }
    return gap;
}

}  // namespace

WitnessPair witness_pair(const Model& base, std::uint64_t seed, double min_gap) {
    const double a0 = std::visit([](const auto& m) { return m.x_dist()[0]; }, base);
    const double natural = natural_cf_level(base);

    // preferred anchors first, hard extremes as fallback
    const double candidates[] = {natural <= 0.5 ? 0.9 : 0.1,
                                 natural <= 0.5 ? 1.0 - 1e-6 : 1e-6};
    double level = candidates[0];
    if ((1.0 - a0) * std::abs(natural - candidates[0]) < min_gap) {
        level = candidates[1];
        if ((1.0 - a0) * std::abs(natural - candidates[1]) < min_gap) {
            std::ostringstream os;
            os << "witness base is degenerate: achievable effect gap "
               << (1.0 - a0) * std::abs(natural - candidates[1]) << " < " << min_gap
               << " (P(X=0) = " << a0 << ")";
            throw DegenerateBaseError(os.str());
        }
    }

    Rng rng(Rng::mix(seed, 0xB17E55));
    Model first = natural_completion(base);
    Model second = extreme_completion(base, level, rng);
    const double e1 = causal_effect_oracle(first, 1);
    const double e2 = causal_effect_oracle(second, 1);
    const double observed_gap = max_observed_gap(first, second);
    return WitnessPair{std::move(first), std::move(second), observed_gap,
                       std::abs(e1 - e2)};
}

WitnessPair witness_pair(const ObservedSummary& base, std::uint64_t seed, double min_gap) {
    const Dims d = base.dims;
    Rng rng(Rng::mix(seed, 0xC0315));
    const double row_floor = std::min(0.05, 0.5 / d.M);
    const double z_floor = std::min(0.05, 0.5 / d.N);

    std::vector<prob::ProbVector> outcome_rows;
    outcome_rows.reserve(static_cast<std::size_t>(d.K) * d.N);
    for (int x = 0; x < d.K; ++x) {
        for (int z = 0; z < d.N; ++z) {
            if (x == 0) {
                outcome_rows.push_back(base.outcome_x0[static_cast<std::size_t>(z)]);
            } else {
                outcome_rows.push_back(to_pv(rng.simplex(d.M, row_floor)));
            }
        }
    }
    auto outcome = prob::CondTable::validated({d.K, d.N}, d.M, std::move(outcome_rows));

    if (base.family == Family::A) {
        auto m = ModelA::validated(d, base.x_dist, base.z0, outcome, outcome);
        return witness_pair(Model(std::move(m)), seed, min_gap);
    }
    std::vector<prob::ProbVector> med_rows;
    med_rows.push_back(base.z0);
    for (int x = 1; x < d.K; ++x) med_rows.push_back(to_pv(rng.simplex(d.N, z_floor)));
    auto mediator = prob::CondTable::validated({d.K}, d.N, std::move(med_rows));
    auto m = ModelB::validated(d, base.x_dist, mediator, mediator, outcome, outcome);
    return witness_pair(Model(std::move(m)), seed, min_gap);
}

}  // namespace cfid::scm
