#include <doctest.h>

#include <cmath>
#include <vector>

#include "cfid/conditions.hpp"
#include "cfid/model.hpp"
#include "cfid/model_io.hpp"
#include "cfid/prob.hpp"
#include "cfid/rng.hpp"
#include "cfid/sampler.hpp"
#include "test_support.hpp"

using namespace cfid;
using namespace cfid::scm;
using ident::Condition;
using prob::CiQuery;
using prob::Dims;
using prob::Var;
using cfid_test::close;
using cfid_test::mediator_rows;
using cfid_test::outcome_rows;
using cfid_test::pv;
using cfid_test::uniform_model_a;
using cfid_test::worked_model_a;

TEST_CASE("uniform parameters give the uniform observed joint") {
    const auto joint = observed_joint(uniform_model_a({3, 3, 3}));
    for (double c : joint.cells()) CHECK(close(c, 1.0 / 27.0, 1e-15));
}

TEST_CASE("observed joint reproduces its factors") {
    const auto m = worked_model_a();
    const auto joint = observed_joint(m);
    const auto mz = prob::marginal(joint, {Var::Z});
    CHECK(close(mz.cells[0], 0.5, 1e-12));
    CHECK(close(mz.cells[1], 0.3, 1e-12));
    CHECK(close(mz.cells[2], 0.2, 1e-12));
    for (int x = 0; x < 3; ++x) {
        for (int z = 0; z < 3; ++z) {
            const auto cond = prob::conditional(joint, Var::Y, {{Var::X, x}, {Var::Z, z}});
            for (int y = 0; y < 3; ++y) {
                CHECK(close(cond[y], m.outcome_obs().at({x, z})[y], 1e-12));
            }
        }
    }
}

TEST_CASE("counterfactual rows are invisible in the observed joint") {
    const auto m1 = std::get<ModelA>(sample_model(Family::A, {3, 3, 3}, {}, 51));
    // same observed parameters, fresh counterfactual rows at X >= 1
    const auto m2_full = std::get<ModelA>(sample_model(Family::A, {3, 3, 3}, {}, 52));
    std::vector<prob::ProbVector> mixed_rows;
    for (int x = 0; x < 3; ++x) {
        for (int z = 0; z < 3; ++z) {
            mixed_rows.push_back(x == 0 ? m1.outcome_obs().at({0, z})
                                        : m2_full.outcome_cf().at({x, z}));
        }
    }
    const auto m2 = ModelA::validated(
        m1.dims(), m1.x_dist(), m1.z_dist(), m1.outcome_obs(),
        prob::CondTable::validated({3, 3}, 3, std::move(mixed_rows)));
    const auto j1 = observed_joint(m1);
    const auto j2 = observed_joint(m2);
    for (std::size_t i = 0; i < j1.cells().size(); ++i) {
        CHECK(j1.cells()[i] == j2.cells()[i]);
    }
}

TEST_CASE("intervention joint equals observed joint when u = b") {
    const auto m = uniform_model_a({2, 3, 2});
    const auto jo = observed_joint(m);
    const auto ji = intervention_joint(m);
    for (std::size_t i = 0; i < jo.cells().size(); ++i) {
        CHECK(jo.cells()[i] == ji.cells()[i]);
    }
}

TEST_CASE("constant counterfactual rows make Y independent of Z given X") {
    const auto m = worked_model_a();
    const auto ji = intervention_joint(m);
    CHECK(prob::check_ci(ji, CiQuery::given_event(Var::Y, Var::Z, Var::X, 1)).independent);
    CHECK(prob::check_ci(ji, CiQuery::given_event(Var::Y, Var::Z, Var::X, 2)).independent);
}

TEST_CASE("family B intervention joint carries the counterfactual mediator") {
    const auto m = std::get<ModelB>(sample_model(Family::B, {3, 3, 3}, {}, 99));
    const auto ji = intervention_joint(m);
    for (int x = 0; x < 3; ++x) {
        const auto cond = prob::conditional(ji, Var::Z, {{Var::X, x}});
        for (int z = 0; z < 3; ++z) {
            CHECK(close(cond[z], m.z_given_x_cf().row(x)[z], 1e-12));
        }
    }
}

TEST_CASE("oracle on constant counterfactual component") {
    const Dims d{3, 3, 3};
    // u^1 = 0.35 everywhere (row 0 included, so b matches)
    const std::vector<double> row{0.4, 0.35, 0.25};
    std::vector<std::vector<double>> rows(9, row);
    const auto table = outcome_rows(d, rows);
    const auto m = ModelA::validated(d, pv({0.5, 0.3, 0.2}), pv({0.2, 0.3, 0.5}),
                                     table, table);
    CHECK(close(causal_effect_oracle(m, 1), 0.35, 1e-15));
}

TEST_CASE("worked oracle value") {
    const auto m = worked_model_a();
    CHECK(close(causal_effect_oracle(m, 1), 0.255, 1e-12));
}

TEST_CASE("oracle values sum to one over outcomes") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = sample_model(seed % 2 ? Family::A : Family::B, {3, 3, 3}, {}, seed);
        double total = 0.0;
        for (int y = 0; y < 3; ++y) total += causal_effect_oracle(m, y);
        CHECK(close(total, 1.0, 1e-12));
    }
}

TEST_CASE("oracle equals the intervention Y marginal") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const Family fam = seed % 2 ? Family::A : Family::B;
        const Dims d = seed % 3 == 0 ? Dims{2, 2, 3} : Dims{3, 3, 3};
        const auto m = sample_model(fam, d, {}, 7000 + seed);
        const auto my = prob::marginal(intervention_joint(m), {Var::Y});
        for (int y = 0; y < d.M; ++y) {
            CHECK(close(causal_effect_oracle(m, y),
                        my.cells[static_cast<std::size_t>(y)], 1e-12));
        }
        CHECK(close(my.sum(), 1.0, 1e-12));
    }
}

TEST_CASE("whole-pin constraint copies the observed rows") {
    const auto m = std::get<ModelA>(
        sample_model(Family::A, {3, 3, 3}, {Condition::xy_given_z()}, 123));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(m.outcome_cf().at({i, j}) == m.outcome_obs().at({0, j}));
        }
    }
    const auto r = ident::condition_holds(Model(m), Condition::xy_given_z());
    CHECK(r.holds);
    CHECK(r.violation <= 1e-9);
}

TEST_CASE("rank-one constraint yields vanishing slice minors") {
    const auto model =
        sample_model(Family::A, {3, 3, 3}, {Condition::xz_given_y_eq(1)}, 321);
    const auto ji = intervention_joint(model);
    const auto r = prob::check_ci(ji, CiQuery::given_event(Var::X, Var::Z, Var::Y, 1));
    CHECK(r.independent);
    CHECK(r.violation <= 1e-9);
    // recompute the minors directly from the conditioned slice
    const auto& ma = std::get<ModelA>(model);
    double mass = 0.0;
    for (int x = 0; x < 3; ++x) {
        for (int z = 0; z < 3; ++z) mass += ji.at(x, 1, z);
    }
    double worst = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int x2 = x + 1; x2 < 3; ++x2) {
            for (int z = 0; z < 2; ++z) {
                for (int z2 = z + 1; z2 < 3; ++z2) {
                    worst = std::max(
                        worst, std::abs(ji.at(x, 1, z) / mass * (ji.at(x2, 1, z2) / mass) -
                                        ji.at(x, 1, z2) / mass * (ji.at(x2, 1, z) / mass)));
                }
            }
        }
    }
    CHECK(worst <= 1e-9);
    CHECK(ma.dims() == Dims{3, 3, 3});
}

TEST_CASE("every single catalog condition is constructible in both families") {
    const Dims d{3, 3, 3};
    for (const Family fam : {Family::A, Family::B}) {
        for (const auto& cond : ident::condition_catalog(d)) {
            for (std::uint64_t seed = 0; seed < 25; ++seed) {
                const auto m = sample_model(fam, d, {cond}, 5000 + seed);
                const auto rg =
                    ident::condition_holds(m, cond, 1e-9, ident::CondMode::generic_ci);
                const auto rl =
                    ident::condition_holds(m, cond, 1e-9, ident::CondMode::paper_literal);
                CHECK(rg.holds);
                CHECK(rl.holds);
            }
        }
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    const ident::AssumptionSet set{Condition::yz(), Condition::xy_given_z_eq(1)};
    const auto m1 = sample_model(Family::A, {3, 3, 3}, set, 888);
    const auto m2 = sample_model(Family::A, {3, 3, 3}, set, 888);
    const auto m3 = sample_model(Family::A, {3, 3, 3}, set, 889);
    CHECK(model_to_json_text(m1) == model_to_json_text(m2));
    CHECK(model_to_json_text(m1) != model_to_json_text(m3));
}

TEST_CASE("unsupported constraint combinations are reported") {
    CHECK_THROWS_AS(sample_model(Family::A, {3, 3, 3},
                                 {Condition::xy(), Condition::yz()}, 1),
                    UnsatisfiableConstraintSetError);
    CHECK_THROWS_AS(sample_model(Family::B, {3, 3, 3},
                                 {Condition::yz(), Condition::yz_given_x_eq(1)}, 1),
                    UnsatisfiableConstraintSetError);
}

TEST_CASE("counterfactual row pinning is enforced at validation") {
    const Dims d{2, 2, 2};
    const std::vector<std::vector<double>> b{
        {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
    const std::vector<std::vector<double>> u{
        {0.4, 0.6}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
    CHECK_THROWS_AS(ModelA::validated(d, pv({0.5, 0.5}), pv({0.5, 0.5}),
                                      outcome_rows(d, b), outcome_rows(d, u)),
                    BadShapeError);
    // family B also pins the mediator row at X=0
    CHECK_THROWS_AS(
        ModelB::validated(d, pv({0.5, 0.5}),
                          mediator_rows(d, {{0.5, 0.5}, {0.5, 0.5}}),
                          mediator_rows(d, {{0.4, 0.6}, {0.5, 0.5}}),
                          outcome_rows(d, b), outcome_rows(d, b)),
        BadShapeError);
}

TEST_CASE("witness pair on the binary uniform base") {
    const auto base = load_model(cfid_test::fixture("witness_base_binary.json"));
    const auto pair = witness_pair(base, 42);
    CHECK(close(causal_effect_oracle(pair.first, 1), 0.5, 1e-15));
    CHECK(close(causal_effect_oracle(pair.second, 1), 0.7, 1e-15));
    CHECK(pair.observed_gap == 0.0);
    CHECK(close(pair.effect_gap, 0.2, 1e-15));
    const auto& m2 = std::get<ModelA>(pair.second);
    CHECK(close(m2.outcome_cf().at({1, 0})[1], 0.9, 1e-15));
}

TEST_CASE("witness pairs share the observed joint and split the effect") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Family fam = seed % 2 ? Family::A : Family::B;
        const auto base = sample_model(fam, {3, 3, 3}, {}, 3000 + seed);
        const auto pair = witness_pair(base, seed);
        CHECK(pair.observed_gap <= 1e-12);
        CHECK(pair.effect_gap >= kDefaultWitnessMinGap);
    }
}

TEST_CASE("witness from a summary completes the base deterministically") {
    const auto model = sample_model(Family::B, {3, 2, 3}, {}, 17);
    const auto summary = observed_summary(model);
    const auto p1 = witness_pair(summary, 5);
    const auto p2 = witness_pair(summary, 5);
    CHECK(model_to_json_text(p1.second) == model_to_json_text(p2.second));
    CHECK(p1.observed_gap <= 1e-12);
    CHECK(p1.effect_gap >= kDefaultWitnessMinGap);
}

TEST_CASE("degenerate witness bases are reported") {
    const Dims d{2, 2, 2};
    const std::vector<std::vector<double>> rows{
        {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
    const auto table = outcome_rows(d, rows);
    const auto base = ModelA::validated(d, pv({0.999, 0.001}), pv({0.5, 0.5}),
                                        table, table);
    CHECK_THROWS_AS(witness_pair(Model(base), 1), DegenerateBaseError);
}
